use std::collections::HashMap;

use rand::{CryptoRng, RngCore};

use super::identity::{create_dt_identity, trace_identity, DtIdentityRecord};
use super::keys::{issue_partial_key, system_init, MasterSecret, PartialKey, SystemParams};
use super::tally::{OpTally, Phase};
use super::ProtocolError;
use crate::crypto::{Digest, PointG1};

/// AUSF/UDM: holds the master secret, issues partial keys, and keeps the
/// identity-tracing database.
pub struct Ausf {
    params: SystemParams,
    master: MasterSecret,
    records: HashMap<Digest, DtIdentityRecord>,
    pub tally: OpTally,
}

impl Ausf {
    pub fn new<R: RngCore + CryptoRng>(kappa: u32, rng: &mut R) -> Result<Self, ProtocolError> {
        let (params, master) = system_init(kappa, rng)?;
        Ok(Ausf {
            params,
            master,
            records: HashMap::new(),
            tally: OpTally::default(),
        })
    }

    pub fn params(&self) -> &SystemParams {
        &self.params
    }

    pub fn master(&self) -> &MasterSecret {
        &self.master
    }

    pub fn issue_partial_key<R: RngCore + CryptoRng>(
        &mut self,
        id: &Digest,
        pk: &PointG1,
        rng: &mut R,
    ) -> PartialKey {
        let mut m = self.tally.meter(Phase::Initialization);
        issue_partial_key(&self.master, id, pk, &mut m, rng)
    }

    /// Allocates `ID_j` for a new twin and stores `(ID_j, U_j)` for tracing.
    pub fn create_dt_identity<R: RngCore + CryptoRng>(
        &mut self,
        supi: &Digest,
        rng: &mut R,
    ) -> DtIdentityRecord {
        let mut m = self.tally.meter(Phase::DtCreation);
        let rec = create_dt_identity(&self.master, supi, &mut m, rng);
        self.records.insert(rec.id_j, rec);
        rec
    }

    /// Reveals the SUPI behind an anonymous twin identity.
    pub fn trace(&mut self, id_j: &Digest) -> Option<Digest> {
        let rec = *self.records.get(id_j)?;
        let mut m = self.tally.meter(Phase::DtCreation);
        Some(trace_identity(&self.master, &rec.id_j, &rec.u_j, &mut m))
    }
}
