//! Primitive-operation metering.
//!
//! Entities perform every costed primitive through a [`Meter`] so that the
//! simulator can compare what was actually executed against the analytic
//! cost models. Point additions, XOR and symmetric encryption are not
//! costed.

use std::collections::BTreeMap;
use std::ops::AddAssign;

use serde::Serialize;

use crate::crypto::{
    self, pairing, AnchorKey, Digest, Encoder, GtValue, HashFn, PointG1, PointG2, Scalar,
    SymmetricKey,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Phase {
    Initialization,
    DtCreation,
    Delegation,
    /// Handover work done before the device reaches the target cell.
    HandoverPrep,
    /// Handover work done after the device reaches the target cell.
    HandoverAccess,
    InterAmf,
}

/// Counts of costed primitives: `T_p`, `T_e`, `T_m`, `T_r`, `T_h`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct OpCounts {
    pub pairing: u64,
    pub exp: u64,
    pub mul: u64,
    pub rsa: u64,
    pub hash: u64,
}

impl AddAssign for OpCounts {
    fn add_assign(&mut self, o: OpCounts) {
        self.pairing += o.pairing;
        self.exp += o.exp;
        self.mul += o.mul;
        self.rsa += o.rsa;
        self.hash += o.hash;
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct OpTally {
    by_phase: BTreeMap<Phase, OpCounts>,
}

impl OpTally {
    pub fn meter(&mut self, phase: Phase) -> Meter<'_> {
        Meter {
            counts: self.by_phase.entry(phase).or_default(),
        }
    }

    pub fn phase(&self, phase: Phase) -> OpCounts {
        self.by_phase.get(&phase).copied().unwrap_or_default()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Phase, OpCounts)> + '_ {
        self.by_phase.iter().map(|(p, c)| (*p, *c))
    }

    pub fn total(&self) -> OpCounts {
        let mut t = OpCounts::default();
        for c in self.by_phase.values() {
            t += *c;
        }
        t
    }
}

/// Counting front-end over the crypto suite.
pub struct Meter<'a> {
    counts: &'a mut OpCounts,
}

impl Meter<'_> {
    pub fn mul(&mut self, p: &PointG1, k: &Scalar) -> PointG1 {
        self.counts.mul += 1;
        p.mul(k)
    }

    pub fn mul_g2(&mut self, p: &PointG2, k: &Scalar) -> PointG2 {
        self.counts.mul += 1;
        p.mul(k)
    }

    /// `k·P` for the first-group generator.
    pub fn mul_gen(&mut self, k: &Scalar) -> PointG1 {
        self.mul(&PointG1::generator(), k)
    }

    pub fn pairing(&mut self, a: &PointG1, b: &PointG2) -> GtValue {
        self.counts.pairing += 1;
        pairing(a, b)
    }

    pub fn h0(&mut self, e: &Encoder) -> Scalar {
        self.counts.hash += 1;
        crypto::h0(e)
    }

    pub fn h1(&mut self, p: &PointG1) -> Digest {
        self.counts.hash += 1;
        crypto::h1(p)
    }

    pub fn h2(&mut self, e: &Encoder) -> Digest {
        self.counts.hash += 1;
        crypto::h2(e)
    }

    pub fn h3(&mut self, e: &Encoder) -> Digest {
        self.counts.hash += 1;
        crypto::h3(e)
    }

    pub fn h4(&mut self, e: &Encoder) -> Digest {
        self.counts.hash += 1;
        crypto::h4(e)
    }

    pub fn h5(&mut self, e: &Encoder) -> Scalar {
        self.counts.hash += 1;
        crypto::h5(e)
    }

    /// Extended-output evaluation of a family member; costed as one hash.
    pub fn mask(&mut self, f: HashFn, e: &Encoder, len: usize) -> Vec<u8> {
        self.counts.hash += 1;
        f.mask(e.as_slice(), len)
    }

    pub fn kdf(&mut self, key: &[u8], label: &[u8]) -> SymmetricKey {
        self.counts.hash += 1;
        crypto::kdf(key, label)
    }

    pub fn kdf_anchor(&mut self, k: &AnchorKey, supi: &[u8], target: &[u8]) -> AnchorKey {
        self.counts.hash += 1;
        crypto::kdf_anchor(k, supi, target)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn meter_counts_by_phase() {
        let mut t = OpTally::default();
        {
            let mut m = t.meter(Phase::HandoverPrep);
            m.mul_gen(&Scalar::ONE);
            m.h4(&Encoder::new());
        }
        t.meter(Phase::HandoverAccess).h2(&Encoder::new());
        assert_eq!(t.phase(Phase::HandoverPrep).mul, 1);
        assert_eq!(t.phase(Phase::HandoverPrep).hash, 1);
        assert_eq!(t.phase(Phase::HandoverAccess).hash, 1);
        assert_eq!(t.total().hash, 2);
        assert_eq!(t.phase(Phase::Delegation), OpCounts::default());
    }
}
