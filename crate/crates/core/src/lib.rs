pub mod crypto;
pub mod protocol;
pub mod sim;
pub mod verify;
pub mod overhead;
