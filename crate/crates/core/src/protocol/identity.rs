//! Anonymous twin identities and their tracing by the AUSF.

use rand::{CryptoRng, RngCore};

use super::keys::MasterSecret;
use super::tally::Meter;
use crate::crypto::{Digest, PointG1, Scalar};

/// Tracing record kept by the UDM: `ID_j = SUPI ⊕ H1(s·U_j)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DtIdentityRecord {
    pub id_j: Digest,
    pub u_j: PointG1,
    pub supi: Digest,
}

pub fn create_dt_identity<R: RngCore + CryptoRng>(
    master: &MasterSecret,
    supi: &Digest,
    meter: &mut Meter<'_>,
    rng: &mut R,
) -> DtIdentityRecord {
    let u = Scalar::random(rng);
    let u_j = meter.mul_gen(&u);
    let shared = meter.mul(&u_j, &master.0);
    let mask = meter.h1(&shared);
    DtIdentityRecord {
        id_j: *supi ^ mask,
        u_j,
        supi: *supi,
    }
}

/// Recovers `SUPI = ID_j ⊕ H1(s·U_j)`.
pub fn trace_identity(
    master: &MasterSecret,
    id_j: &Digest,
    u_j: &PointG1,
    meter: &mut Meter<'_>,
) -> Digest {
    let shared = meter.mul(u_j, &master.0);
    *id_j ^ meter.h1(&shared)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crypto::h1;
    use crate::protocol::keys::system_init;
    use crate::protocol::tally::{OpTally, Phase};
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn trace_inverts_creation() {
        let mut rng = ChaCha20Rng::seed_from_u64(11);
        let (_, master) = system_init(254, &mut rng).unwrap();
        let mut t = OpTally::default();
        let mut m = t.meter(Phase::DtCreation);
        for i in 0..32u8 {
            let supi = Digest([i; 16]);
            let rec = create_dt_identity(&master, &supi, &mut m, &mut rng);
            assert_eq!(trace_identity(&master, &rec.id_j, &rec.u_j, &mut m), supi);
        }
        let zero = Digest::default();
        let rec = create_dt_identity(&master, &zero, &mut m, &mut rng);
        assert_eq!(trace_identity(&master, &rec.id_j, &rec.u_j, &mut m), zero);
    }

    #[test]
    fn fresh_identity_per_creation_and_swapped_points_fail() {
        let mut rng = ChaCha20Rng::seed_from_u64(12);
        let (_, master) = system_init(254, &mut rng).unwrap();
        let mut t = OpTally::default();
        let mut m = t.meter(Phase::DtCreation);
        let supi = Digest([9; 16]);
        let a = create_dt_identity(&master, &supi, &mut m, &mut rng);
        let b = create_dt_identity(&master, &supi, &mut m, &mut rng);
        assert_ne!(a.id_j, b.id_j);
        assert_ne!(trace_identity(&master, &a.id_j, &b.u_j, &mut m), supi);
        // without s, masking with H1 of the public point alone does not reveal SUPI
        assert_ne!(a.id_j ^ h1(&a.u_j), supi);
    }
}
