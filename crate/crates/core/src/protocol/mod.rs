//! The five protocol phases as per-entity state machines.
//!
//! Each entity (AUSF, AMF, gNB, MD, DT) owns its secrets and an [`OpTally`];
//! message constructors and verifiers are methods that take the decoded
//! message, a [`Clock`], and an RNG where fresh randomness is needed.
//! Every verifier returns a [`Rejection`] naming the failed check.

mod amf;
mod ausf;
mod dt;
mod gnb;
mod identity;
mod keys;
mod md;
pub mod messages;
mod tally;
pub mod wire;

use serde::{Deserialize, Serialize};

pub use amf::{Amf, SubscriberRecord, TransferredContext};
pub use ausf::Ausf;
pub use dt::{delegation_holds, AccessDelegation, DigitalTwin};
pub use gnb::{Gnb, GnbSession, VerifiedRequest};
pub use identity::{create_dt_identity, trace_identity, DtIdentityRecord};
pub use keys::{
    bound_public_key, issue_partial_key, label_id, system_init, verify_partial_key, EntityKeys,
    KeyDirectory, MasterSecret, PartialKey, PublishedKey, SystemParams, SUPPORTED_KAPPA,
};
pub use md::{MobileDevice, SessionKeys};
pub use tally::{Meter, OpCounts, OpTally, Phase};

/// Default freshness window in simulated milliseconds.
pub const DEFAULT_DELTA_T_MS: u64 = 5000;

/// Why a verifier refused a message.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rejection {
    /// Timestamp outside ΔT, reused nonce, or replayed message.
    Freshness,
    /// Schnorr-style proof, delegation, or λ_j check failed.
    Signature,
    /// The MD's authorization token did not verify.
    Token,
    /// A MAC did not verify.
    Mac,
    UnknownTid,
    /// Authenticated decryption failed.
    Decryption,
    Malformed,
    UnknownEntity,
    /// No pending exchange this message could answer.
    Unexpected,
}

impl Rejection {
    pub fn as_str(self) -> &'static str {
        match self {
            Rejection::Freshness => "freshness",
            Rejection::Signature => "signature",
            Rejection::Token => "token",
            Rejection::Mac => "mac",
            Rejection::UnknownTid => "unknown-tid",
            Rejection::Decryption => "decryption",
            Rejection::Malformed => "malformed",
            Rejection::UnknownEntity => "unknown-entity",
            Rejection::Unexpected => "unexpected",
        }
    }
}

impl std::fmt::Display for Rejection {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::error::Error for Rejection {}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ProtocolError {
    #[error("unsupported security parameter kappa={0}")]
    UnsupportedParameters(u32),
    #[error("rejected: {0}")]
    Rejected(#[from] Rejection),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Role {
    Md,
    Dt,
    Gnb,
    Amf,
    Ausf,
}

impl Role {
    pub fn as_str(self) -> &'static str {
        match self {
            Role::Md => "md",
            Role::Dt => "dt",
            Role::Gnb => "gnb",
            Role::Amf => "amf",
            Role::Ausf => "ausf",
        }
    }
}

/// An entity's view of time when it handles a message.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Clock {
    pub now_ms: u64,
    pub delta_t_ms: u64,
}

impl Clock {
    pub fn new(now_ms: u64, delta_t_ms: u64) -> Self {
        Clock { now_ms, delta_t_ms }
    }

    /// Current time truncated to the 32-bit wire timestamp.
    pub fn timestamp(&self) -> u32 {
        self.now_ms as u32
    }

    /// `|now − ts| ≤ ΔT`, evaluated modulo 2^32.
    pub fn is_fresh(&self, ts: u32) -> bool {
        let diff = self.timestamp().wrapping_sub(ts) as i32;
        u64::from(diff.unsigned_abs()) <= self.delta_t_ms
    }

    pub fn check(&self, ts: u32) -> Result<(), Rejection> {
        if self.is_fresh(ts) {
            Ok(())
        } else {
            Err(Rejection::Freshness)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn freshness_window() {
        let c = Clock::new(10_000, 5000);
        assert!(c.is_fresh(10_000));
        assert!(c.is_fresh(5_000));
        assert!(!c.is_fresh(4_999));
        assert!(c.is_fresh(15_000));
        assert!(!c.is_fresh(15_001));
    }

    #[test]
    fn freshness_survives_32_bit_wrap() {
        let c = Clock::new((1u64 << 32) + 10, 5000);
        assert!(c.is_fresh(u32::MAX - 100));
        assert!(!c.is_fresh(u32::MAX - 10_000));
    }
}
