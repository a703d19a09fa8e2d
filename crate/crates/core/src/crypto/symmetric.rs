//! Key derivation and authenticated encryption.

use std::fmt;

use aes_gcm::aead::{Aead, KeyInit, Payload};
use aes_gcm::{Aes128Gcm, Nonce};
use hmac::{Hmac, Mac};
use rand::{CryptoRng, RngCore};
use sha2::Sha256;

use super::CryptoError;

pub const SYMMETRIC_KEY_BYTES: usize = 16;
pub const ANCHOR_KEY_BYTES: usize = 32;
const GCM_NONCE_BYTES: usize = 12;

/// FC value used for every derivation in this crate.
const KDF_FC: u8 = 0x69;

/// 128-bit symmetric key.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct SymmetricKey(pub [u8; SYMMETRIC_KEY_BYTES]);

impl SymmetricKey {
    pub fn random<R: RngCore + CryptoRng>(rng: &mut R) -> Self {
        let mut k = [0u8; SYMMETRIC_KEY_BYTES];
        rng.fill_bytes(&mut k);
        SymmetricKey(k)
    }
}

impl fmt::Debug for SymmetricKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SymmetricKey({})", hex::encode(self.0))
    }
}

/// 256-bit anchor key (`k_SEAF`).
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct AnchorKey(pub [u8; ANCHOR_KEY_BYTES]);

impl AnchorKey {
    pub fn random<R: RngCore + CryptoRng>(rng: &mut R) -> Self {
        let mut k = [0u8; ANCHOR_KEY_BYTES];
        rng.fill_bytes(&mut k);
        AnchorKey(k)
    }

    /// `k ⊕ N` with the nonce right-aligned in the key.
    pub fn xor_nonce(&self, nonce: u128) -> [u8; ANCHOR_KEY_BYTES] {
        let mut out = self.0;
        for (a, b) in out[ANCHOR_KEY_BYTES - 16..].iter_mut().zip(nonce.to_be_bytes()) {
            *a ^= b;
        }
        out
    }
}

impl fmt::Debug for AnchorKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AnchorKey({})", hex::encode(self.0))
    }
}

/// Generic KDF: `HMAC-SHA-256(key, FC ‖ P0 ‖ L0 ‖ P1 ‖ L1 ‖ ...)` with 16-bit lengths.
pub fn kdf_raw(key: &[u8], params: &[&[u8]]) -> [u8; 32] {
    let mut mac = <Hmac<Sha256> as Mac>::new_from_slice(key).expect("hmac accepts any key length");
    mac.update(&[KDF_FC]);
    for p in params {
        mac.update(p);
        mac.update(&(p.len() as u16).to_be_bytes());
    }
    mac.finalize().into_bytes().into()
}

/// Derives a 128-bit algorithm key; keeps the 128 least significant bits.
pub fn kdf(key: &[u8], label: &[u8]) -> SymmetricKey {
    let full = kdf_raw(key, &[label]);
    let mut k = [0u8; SYMMETRIC_KEY_BYTES];
    k.copy_from_slice(&full[32 - SYMMETRIC_KEY_BYTES..]);
    SymmetricKey(k)
}

/// Derives a new anchor key bound to the subscriber and the target AMF.
pub fn kdf_anchor(k_seaf: &AnchorKey, supi: &[u8], target_amf: &[u8]) -> AnchorKey {
    AnchorKey(kdf_raw(&k_seaf.0, &[supi, target_amf]))
}

/// AES-128-GCM; output is `nonce ‖ ciphertext ‖ tag`.
pub fn aead_encrypt<R: RngCore + CryptoRng>(
    key: &SymmetricKey,
    plaintext: &[u8],
    associated_data: &[u8],
    rng: &mut R,
) -> Vec<u8> {
    let cipher = Aes128Gcm::new_from_slice(&key.0).expect("128-bit key");
    let mut nonce = [0u8; GCM_NONCE_BYTES];
    rng.fill_bytes(&mut nonce);
    let ct = cipher
        .encrypt(
            Nonce::from_slice(&nonce),
            Payload {
                msg: plaintext,
                aad: associated_data,
            },
        )
        .expect("in-memory encryption cannot fail");
    let mut out = nonce.to_vec();
    out.extend_from_slice(&ct);
    out
}

pub fn aead_decrypt(
    key: &SymmetricKey,
    ciphertext: &[u8],
    associated_data: &[u8],
) -> Result<Vec<u8>, CryptoError> {
    if ciphertext.len() < GCM_NONCE_BYTES + 16 {
        return Err(CryptoError::Authentication);
    }
    let (nonce, body) = ciphertext.split_at(GCM_NONCE_BYTES);
    let cipher = Aes128Gcm::new_from_slice(&key.0).expect("128-bit key");
    cipher
        .decrypt(
            Nonce::from_slice(nonce),
            Payload {
                msg: body,
                aad: associated_data,
            },
        )
        .map_err(|_| CryptoError::Authentication)
}
