//! System initialization, certificateless partial keys, and the replicated
//! public-key directory.

use std::collections::HashMap;

use rand::{CryptoRng, RngCore};

use super::tally::Meter;
use super::ProtocolError;
use crate::crypto::{Digest, DualPublicKey, Encoder, PointG1, Scalar};

/// Security levels this build supports: the bit length of the BN254 base field.
pub const SUPPORTED_KAPPA: &[u32] = &[254];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SystemParams {
    pub kappa: u32,
    pub pk_pub: PointG1,
}

impl SystemParams {
    pub fn generator(&self) -> PointG1 {
        PointG1::generator()
    }
}

/// The AUSF master scalar `s`.
#[derive(Clone)]
pub struct MasterSecret(pub(crate) Scalar);

impl MasterSecret {
    /// Only for tests that need to reason about what the master key enables.
    pub fn expose(&self) -> Scalar {
        self.0
    }
}

pub fn system_init<R: RngCore + CryptoRng>(
    kappa: u32,
    rng: &mut R,
) -> Result<(SystemParams, MasterSecret), ProtocolError> {
    if !SUPPORTED_KAPPA.contains(&kappa) {
        return Err(ProtocolError::UnsupportedParameters(kappa));
    }
    let s = Scalar::random(rng);
    let params = SystemParams {
        kappa,
        pk_pub: PointG1::generator().mul(&s),
    };
    Ok((params, MasterSecret(s)))
}

/// Partial private key `(x, Y)` issued by the AUSF.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PartialKey {
    pub x: Scalar,
    pub y: PointG1,
}

fn identity_hash(id: &Digest, pk: &PointG1) -> Encoder {
    Encoder::new().digest(id).g1(pk)
}

/// `x = y + s·H0(ID, pk)`, `Y = y·P` with fresh `y`.
pub fn issue_partial_key<R: RngCore + CryptoRng>(
    master: &MasterSecret,
    id: &Digest,
    pk: &PointG1,
    meter: &mut Meter<'_>,
    rng: &mut R,
) -> PartialKey {
    let y = Scalar::random(rng);
    let big_y = meter.mul_gen(&y);
    let x = y + master.0 * meter.h0(&identity_hash(id, pk));
    PartialKey { x, y: big_y }
}

/// Accepts iff `x·P = Y + H0(ID, pk)·pk_pub`.
pub fn verify_partial_key(
    params: &SystemParams,
    id: &Digest,
    pk: &PointG1,
    partial: &PartialKey,
    meter: &mut Meter<'_>,
) -> bool {
    let lhs = meter.mul_gen(&partial.x);
    let h = meter.h0(&identity_hash(id, pk));
    lhs == partial.y + meter.mul(&params.pk_pub, &h)
}

/// `bpk = Y + H0(ID, pk)·pk_pub`, equal to `x·P` for an honest partial key.
pub fn bound_public_key(
    params: &SystemParams,
    id: &Digest,
    pk: &PointG1,
    y: &PointG1,
    meter: &mut Meter<'_>,
) -> PointG1 {
    let h = meter.h0(&identity_hash(id, pk));
    *y + meter.mul(&params.pk_pub, &h)
}

/// An entity's own key material.
#[derive(Clone, Debug)]
pub struct EntityKeys {
    pub id: Digest,
    pub sk: Scalar,
    pub pk: DualPublicKey,
    pub partial: Option<PartialKey>,
}

impl EntityKeys {
    pub fn generate<R: RngCore + CryptoRng>(id: Digest, rng: &mut R) -> Self {
        let sk = Scalar::random(rng);
        EntityKeys {
            id,
            sk,
            pk: DualPublicKey::from_secret(&sk),
            partial: None,
        }
    }

    /// Invariants: `pk = sk·P` in both groups and, when present, the partial key verifies.
    pub fn is_well_formed(&self, params: &SystemParams, meter: &mut Meter<'_>) -> bool {
        let pk_ok = DualPublicKey::from_secret(&self.sk) == self.pk;
        let partial_ok = self
            .partial
            .map(|p| verify_partial_key(params, &self.id, &self.pk.g1, &p, meter))
            .unwrap_or(true);
        pk_ok && partial_ok
    }
}

/// Published `(ID, pk, Y)` of a core or radio entity, with `bpk` precomputed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PublishedKey {
    pub id: Digest,
    pub pk: PointG1,
    pub y: PointG1,
    pub bpk: PointG1,
}

/// Replicated directory of public keys, populated at initialization and DT creation.
#[derive(Clone, Debug, Default)]
pub struct KeyDirectory {
    amfs: HashMap<Digest, PublishedKey>,
    gnbs: HashMap<Digest, PublishedKey>,
    gnb_domain: HashMap<Digest, Digest>,
    twins: HashMap<Digest, DualPublicKey>,
    devices: HashMap<Digest, DualPublicKey>,
}

impl KeyDirectory {
    pub fn publish_amf(&mut self, key: PublishedKey) {
        self.amfs.insert(key.id, key);
    }

    pub fn publish_gnb(&mut self, key: PublishedKey, amf: Digest) {
        self.gnbs.insert(key.id, key);
        self.gnb_domain.insert(key.id, amf);
    }

    pub fn register_twin(&mut self, id_j: Digest, pk: DualPublicKey) {
        self.twins.insert(id_j, pk);
    }

    pub fn register_device(&mut self, supi: Digest, pk: DualPublicKey) {
        self.devices.insert(supi, pk);
    }

    pub fn amf(&self, id: &Digest) -> Option<&PublishedKey> {
        self.amfs.get(id)
    }

    pub fn gnb(&self, id: &Digest) -> Option<&PublishedKey> {
        self.gnbs.get(id)
    }

    pub fn gnb_domain(&self, gnb: &Digest) -> Option<&Digest> {
        self.gnb_domain.get(gnb)
    }

    pub fn twin(&self, id_j: &Digest) -> Option<&DualPublicKey> {
        self.twins.get(id_j)
    }

    pub fn device(&self, supi: &Digest) -> Option<&DualPublicKey> {
        self.devices.get(supi)
    }
}

/// Stable 128-bit identifier for a named entity (configuration plumbing, not a protocol hash).
pub fn label_id(name: &str) -> Digest {
    use sha2::{Digest as _, Sha256};
    let h = Sha256::new().chain_update(b"entity-id:").chain_update(name).finalize();
    Digest::from_slice(&h[..16]).expect("16 bytes")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::tally::{OpTally, Phase};
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn setup(seed: u64) -> (SystemParams, MasterSecret, ChaCha20Rng) {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let (p, s) = system_init(254, &mut rng).unwrap();
        (p, s, rng)
    }

    #[test]
    fn init_is_deterministic_and_binds_master() {
        let (p1, s1, _) = setup(5);
        let (p2, _, _) = setup(5);
        assert_eq!(p1, p2);
        assert_eq!(p1.pk_pub, PointG1::generator().mul(&s1.expose()));
    }

    #[test]
    fn unsupported_kappa() {
        let mut rng = ChaCha20Rng::seed_from_u64(0);
        assert!(matches!(
            system_init(128, &mut rng),
            Err(ProtocolError::UnsupportedParameters(128))
        ));
    }

    #[test]
    fn partial_key_roundtrip_tamper_and_cross_identity() {
        let (params, master, mut rng) = setup(6);
        let mut t = OpTally::default();
        let mut m = t.meter(Phase::Initialization);
        let keys = EntityKeys::generate(label_id("amf-1"), &mut rng);
        let pk = keys.pk.g1;
        let a = issue_partial_key(&master, &keys.id, &pk, &mut m, &mut rng);
        let b = issue_partial_key(&master, &keys.id, &pk, &mut m, &mut rng);
        assert_ne!(a, b);
        assert!(verify_partial_key(&params, &keys.id, &pk, &a, &mut m));
        assert!(verify_partial_key(&params, &keys.id, &pk, &b, &mut m));

        let tampered = PartialKey {
            x: a.x,
            y: a.y + PointG1::generator(),
        };
        assert!(!verify_partial_key(&params, &keys.id, &pk, &tampered, &mut m));
        assert!(!verify_partial_key(&params, &label_id("amf-2"), &pk, &a, &mut m));

        let bpk = bound_public_key(&params, &keys.id, &pk, &a.y, &mut m);
        assert_eq!(bpk, PointG1::generator().mul(&a.x));
    }
}
