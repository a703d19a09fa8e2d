use std::collections::{HashMap, HashSet};

use rand::{CryptoRng, RngCore};

use super::ausf::Ausf;
use super::keys::{bound_public_key, verify_partial_key, EntityKeys, KeyDirectory, PublishedKey};
use super::messages::{HandoverAck, HandoverRequest, HandoverResponse};
use super::tally::{Meter, OpTally, Phase};
use super::wire::WireMessage;
use super::{Clock, Rejection};
use crate::crypto::{Digest, DualPublicKey, Encoder, PointG1, Scalar, SymmetricKey};

/// A handover request whose hashes have been recomputed by the gNB.
#[derive(Clone, Debug)]
pub struct VerifiedRequest {
    pub req: HandoverRequest,
    pub pk_j: DualPublicKey,
    h1: Scalar,
    h2: Scalar,
    h3: Scalar,
    h4: Scalar,
}

/// gNB-side state for one handover, keyed by `TID_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GnbSession {
    pub guti: Digest,
    pub id_j: Digest,
    pub k_i: PointG1,
    pub k_gnb: Digest,
    pub tck: SymmetricKey,
    pub tik: SymmetricKey,
    pub tid: Digest,
    pub established: bool,
}

pub struct Gnb {
    keys: EntityKeys,
    published: PublishedKey,
    domain: Digest,
    sessions: HashMap<Digest, GnbSession>,
    seen_requests: HashSet<Vec<u8>>,
    ephemerals: HashMap<Digest, Scalar>,
    pub tally: OpTally,
}

impl Gnb {
    pub fn provision<R: RngCore + CryptoRng>(
        id: Digest,
        domain: Digest,
        ausf: &mut Ausf,
        rng: &mut R,
    ) -> Result<Self, Rejection> {
        let mut keys = EntityKeys::generate(id, rng);
        let partial = ausf.issue_partial_key(&id, &keys.pk.g1, rng);
        let params = *ausf.params();
        let mut tally = OpTally::default();
        let bpk = {
            let mut m = tally.meter(Phase::Initialization);
            if !verify_partial_key(&params, &id, &keys.pk.g1, &partial, &mut m) {
                return Err(Rejection::Signature);
            }
            bound_public_key(&params, &id, &keys.pk.g1, &partial.y, &mut m)
        };
        keys.partial = Some(partial);
        Ok(Gnb {
            published: PublishedKey {
                id,
                pk: keys.pk.g1,
                y: partial.y,
                bpk,
            },
            keys,
            domain,
            sessions: HashMap::new(),
            seen_requests: HashSet::new(),
            ephemerals: HashMap::new(),
            tally,
        })
    }

    pub fn id(&self) -> Digest {
        self.keys.id
    }

    /// The AMF whose delegations this gNB accepts.
    pub fn domain(&self) -> Digest {
        self.domain
    }

    pub fn published_key(&self) -> PublishedKey {
        self.published
    }

    pub fn session(&self, tid: &Digest) -> Option<&GnbSession> {
        self.sessions.get(tid)
    }

    pub fn sessions(&self) -> impl Iterator<Item = &GnbSession> {
        self.sessions.values()
    }

    /// Long-term `sk_g2` (exposed for leakage experiments).
    pub fn long_term(&self) -> Scalar {
        self.keys.sk
    }

    /// Ephemeral `c_g2` used for the session `tid` (exposed for leakage experiments).
    pub fn ephemeral(&self, tid: &Digest) -> Option<Scalar> {
        self.ephemerals.get(tid).copied()
    }

    /// Freshness, key lookup, and recomputation of `h1'..h4'` with `Z_j' = sk·(pk_j + B_j)`.
    pub fn precheck(
        &mut self,
        req: &HandoverRequest,
        dir: &KeyDirectory,
        clock: &Clock,
    ) -> Result<VerifiedRequest, Rejection> {
        clock.check(req.ts1)?;
        if self.seen_requests.contains(&req.encode().bytes) {
            return Err(Rejection::Freshness);
        }
        let pk_j = *dir.twin(&req.id_j).ok_or(Rejection::UnknownEntity)?;
        let mut m = self.tally.meter(Phase::HandoverPrep);
        let h1 = m.h0(&Encoder::new().digest(&req.guti).g1(&req.r_j));
        let h2 = m.h0(&Encoder::new().digest(&req.id_j).g1(&pk_j.g1));
        let h3 = m.h0(&Encoder::new().g1(&req.a_i).timestamp(req.ts1));
        let z_j = m.mul(&(pk_j.g1 + req.b_j), &self.keys.sk);
        let h4 = m.h0(&Encoder::new().g1(&z_j).digest(&req.id_j));
        Ok(VerifiedRequest {
            req: req.clone(),
            pk_j,
            h1,
            h2,
            h3,
            h4,
        })
    }

    fn amf_key<'a>(&self, dir: &'a KeyDirectory) -> Result<&'a PublishedKey, Rejection> {
        dir.amf(&self.domain).ok_or(Rejection::UnknownEntity)
    }

    /// `λ_j·P = h3'·(pk_a + h1'·bpk_a + h2'·R_j) + h4'·B_j`
    fn single_equation(v: &VerifiedRequest, amf: &PublishedKey, m: &mut Meter<'_>) -> bool {
        let r = &v.req;
        let inner = amf.pk + m.mul(&amf.bpk, &v.h1) + m.mul(&r.r_j, &v.h2);
        m.mul_gen(&r.lambda) == m.mul(&inner, &v.h3) + m.mul(&r.b_j, &v.h4)
    }

    /// Verifies one handover request from a twin.
    pub fn verify_handover_request(
        &mut self,
        req: &HandoverRequest,
        dir: &KeyDirectory,
        clock: &Clock,
    ) -> Result<VerifiedRequest, Rejection> {
        let v = self.precheck(req, dir, clock)?;
        let amf = *self.amf_key(dir)?;
        let mut m = self.tally.meter(Phase::HandoverPrep);
        if Self::single_equation(&v, &amf, &mut m) {
            Ok(v)
        } else {
            Err(Rejection::Signature)
        }
    }

    /// Batch equation over already-prepared requests:
    /// `Σλ·P = (Σh3)·pk_a + (Σh1h3)·bpk_a + Σ(h3h2)·R_j + Σh4·B_j`.
    /// The empty batch is accepted.
    pub fn batch_verify(&mut self, batch: &[VerifiedRequest], dir: &KeyDirectory) -> Result<bool, Rejection> {
        if batch.is_empty() {
            return Ok(true);
        }
        let amf = *self.amf_key(dir)?;
        let mut m = self.tally.meter(Phase::HandoverPrep);
        let mut sum_lambda = Scalar::ZERO;
        let mut sum_h3 = Scalar::ZERO;
        let mut sum_h1h3 = Scalar::ZERO;
        let mut rhs = PointG1::identity();
        for v in batch {
            sum_lambda += v.req.lambda;
            sum_h3 += v.h3;
            sum_h1h3 += v.h1 * v.h3;
            rhs = rhs + m.mul(&v.req.r_j, &(v.h3 * v.h2)) + m.mul(&v.req.b_j, &v.h4);
        }
        rhs = rhs + m.mul(&amf.pk, &sum_h3) + m.mul(&amf.bpk, &sum_h1h3);
        Ok(m.mul_gen(&sum_lambda) == rhs)
    }

    /// Verifies many requests: per-request prechecks, one batch equation, and
    /// individual re-verification only when the batch fails.
    pub fn verify_many(
        &mut self,
        reqs: &[HandoverRequest],
        dir: &KeyDirectory,
        clock: &Clock,
    ) -> Vec<Result<VerifiedRequest, Rejection>> {
        let prepared: Vec<Result<VerifiedRequest, Rejection>> =
            reqs.iter().map(|r| self.precheck(r, dir, clock)).collect();
        let ok: Vec<VerifiedRequest> = prepared.iter().filter_map(|p| p.as_ref().ok().cloned()).collect();
        match self.batch_verify(&ok, dir) {
            Ok(true) => prepared,
            Ok(false) => {
                let amf = match self.amf_key(dir) {
                    Ok(a) => *a,
                    Err(e) => return reqs.iter().map(|_| Err(e)).collect(),
                };
                let mut m = self.tally.meter(Phase::HandoverPrep);
                prepared
                    .into_iter()
                    .map(|p| {
                        p.and_then(|v| {
                            if Self::single_equation(&v, &amf, &mut m) {
                                Ok(v)
                            } else {
                                Err(Rejection::Signature)
                            }
                        })
                    })
                    .collect()
            }
            Err(e) => reqs.iter().map(|_| Err(e)).collect(),
        }
    }

    /// Derives the session key material, stores `(TID_i, k_gNB*)`, and answers the twin.
    pub fn make_response<R: RngCore + CryptoRng>(
        &mut self,
        v: &VerifiedRequest,
        clock: &Clock,
        rng: &mut R,
    ) -> HandoverResponse {
        let req = &v.req;
        let id_g2 = self.keys.id;
        let mut m = self.tally.meter(Phase::HandoverPrep);
        let c = Scalar::random(rng);
        let c_g2 = m.mul_gen(&(c * self.keys.sk));
        let k_i = m.mul(&req.a_i, &(self.keys.sk * c));
        let k_gnb = m.h2(&Encoder::new().g1(&k_i).digest(&req.guti).digest(&id_g2));
        let tck = m.kdf(&k_gnb.0, b"Enc");
        let tik = m.kdf(&k_gnb.0, b"Int");
        let tid = m.h4(&Encoder::new().digest(&k_gnb).digest(&req.guti).digest(&id_g2));
        let h5 = m.h5(&Encoder::new().bytes(&tik.0).digest(&tid).digest(&req.id_j));
        let ts2 = clock.timestamp();
        let shared = m.mul(&req.b_j, &(self.keys.sk * h5));
        let mac2 = m.h2(&Encoder::new().g1(&shared).g1(&c_g2).timestamp(ts2));
        self.seen_requests.insert(req.encode().bytes);
        self.ephemerals.insert(tid, c);
        self.sessions.insert(
            tid,
            GnbSession {
                guti: req.guti,
                id_j: req.id_j,
                k_i,
                k_gnb,
                tck,
                tik,
                tid,
                established: false,
            },
        );
        HandoverResponse {
            id_g2,
            c_g2,
            h5,
            mac2,
            ts2,
        }
    }

    /// Key confirmation from the MD on arrival in the cell.
    pub fn verify_ack(&mut self, ack: &HandoverAck, clock: &Clock) -> Result<GnbSession, Rejection> {
        clock.check(ack.ts4)?;
        let mut m = self.tally.meter(Phase::HandoverAccess);
        let session = self.sessions.get_mut(&ack.tid).ok_or(Rejection::UnknownTid)?;
        if session.established {
            return Err(Rejection::Freshness);
        }
        let mac4 = m.h2(&Encoder::new().bytes(&session.tik.0).digest(&ack.tid).timestamp(ack.ts4));
        if mac4 != ack.mac4 {
            return Err(Rejection::Mac);
        }
        session.established = true;
        Ok(session.clone())
    }
}
