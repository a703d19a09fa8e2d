//! Algebraic and symmetric primitives: BN254 pairing groups, the tagged hash
//! family, a 3GPP-style KDF, and AES-128-GCM.

mod group;
mod hash;
mod symmetric;

pub use group::{
    group_order_be, pairing, DualPublicKey, GtValue, PointG1, PointG2, Scalar, G1_BYTES,
    G2_BYTES, GT_BYTES, SCALAR_BYTES,
};
pub use hash::{h0, h1, h2, h3, h4, h5, xor_into, Digest, Encoder, HashFn, DIGEST_BYTES};
pub use symmetric::{
    aead_decrypt, aead_encrypt, kdf, kdf_anchor, kdf_raw, AnchorKey, SymmetricKey,
    ANCHOR_KEY_BYTES, SYMMETRIC_KEY_BYTES,
};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CryptoError {
    #[error("authentication failed")]
    Authentication,
    #[error("invalid encoding: {0}")]
    Encoding(&'static str),
}
