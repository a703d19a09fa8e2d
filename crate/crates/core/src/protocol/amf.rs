use std::collections::{HashMap, HashSet};

use rand::{CryptoRng, RngCore};

use super::ausf::Ausf;
use super::keys::{bound_public_key, verify_partial_key, EntityKeys, KeyDirectory, PublishedKey};
use super::messages::{
    ContextTransfer, DelegationRequest, DelegationResponse, InterDelegationRequest,
    InterDelegationResponse,
};
use super::tally::{Meter, OpTally, Phase};
use super::wire::WireMessage;
use super::{Clock, Rejection};
use crate::crypto::{
    AnchorKey, Digest, DualPublicKey, Encoder, GtValue, HashFn, PointG1, Scalar, SCALAR_BYTES,
};

/// What the AMF learned about a subscriber from the initial 5G-AKA attach.
#[derive(Clone, Debug)]
pub struct SubscriberRecord {
    pub supi: Digest,
    pub k_seaf: AnchorKey,
    pub pk_i: DualPublicKey,
}

#[derive(Clone, Debug)]
struct IssuedDelegation {
    supi: Digest,
    k_seaf: AnchorKey,
    delta_p: PointG1,
}

/// Security context held by a target AMF after an N14 transfer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TransferredContext {
    pub supi: Digest,
    pub id_j: Digest,
    pub k_seaf: AnchorKey,
    pub guti: Digest,
    pub delta_p: PointG1,
}

pub struct Amf {
    keys: EntityKeys,
    x: Scalar,
    published: PublishedKey,
    subscribers: HashMap<Digest, SubscriberRecord>,
    seen_nonces: HashSet<u128>,
    issued: HashMap<Digest, IssuedDelegation>,
    contexts: HashMap<Digest, TransferredContext>,
    seen_inter: HashSet<Vec<u8>>,
    seen_contexts: HashSet<Vec<u8>>,
    pub tally: OpTally,
}

/// `δ = sk + x·h1 + r·h2` with `h1 = H0(GUTI, R)`, `h2 = H0(ID_j, pk_j)`.
fn make_delegation<R: RngCore + CryptoRng>(
    sk: &Scalar,
    x: &Scalar,
    guti: &Digest,
    id_j: &Digest,
    pk_j: &PointG1,
    m: &mut Meter<'_>,
    rng: &mut R,
) -> (Scalar, Scalar, PointG1) {
    let r = Scalar::random(rng);
    let big_r = m.mul_gen(&r);
    let h1 = m.h0(&Encoder::new().digest(guti).g1(&big_r));
    let h2 = m.h0(&Encoder::new().digest(id_j).g1(pk_j));
    (*sk + *x * h1 + r * h2, r, big_r)
}

fn xor_scalar(delta: &Scalar, mask: &[u8]) -> [u8; SCALAR_BYTES] {
    let mut out = delta.to_bytes();
    crate::crypto::xor_into(&mut out, mask);
    out
}

impl Amf {
    /// Generates keys, obtains and checks a partial key from the AUSF, and publishes.
    pub fn provision<R: RngCore + CryptoRng>(
        id: Digest,
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
        Ok(Amf {
            published: PublishedKey {
                id,
                pk: keys.pk.g1,
                y: partial.y,
                bpk,
            },
            x: partial.x,
            keys,
            subscribers: HashMap::new(),
            seen_nonces: HashSet::new(),
            issued: HashMap::new(),
            contexts: HashMap::new(),
            seen_inter: HashSet::new(),
            seen_contexts: HashSet::new(),
            tally,
        })
    }

    pub fn id(&self) -> Digest {
        self.keys.id
    }

    /// Long-term `(sk_a, x_a)` (exposed for leakage experiments).
    pub fn long_term(&self) -> (Scalar, Scalar) {
        (self.keys.sk, self.x)
    }

    pub fn published_key(&self) -> PublishedKey {
        self.published
    }

    /// Stand-in for the initial 5G-AKA: installs the anchor key and GUTI.
    pub fn attach(&mut self, guti: Digest, record: SubscriberRecord) {
        self.subscribers.insert(guti, record);
    }

    pub fn subscriber(&self, guti: &Digest) -> Option<&SubscriberRecord> {
        self.subscribers.get(guti)
    }

    pub fn context(&self, id_j: &Digest) -> Option<&TransferredContext> {
        self.contexts.get(id_j)
    }

    /// Verifies a twin's delegation request and issues `(R_j, w2)`.
    pub fn issue_delegation<R: RngCore + CryptoRng>(
        &mut self,
        req: &DelegationRequest,
        dir: &KeyDirectory,
        rng: &mut R,
    ) -> Result<DelegationResponse, Rejection> {
        if self.seen_nonces.contains(&req.nonce_plus_1) {
            return Err(Rejection::Freshness);
        }
        let pk_j = *dir.twin(&req.id_j).ok_or(Rejection::UnknownEntity)?;
        let mut m = self.tally.meter(Phase::Delegation);

        // L_j' = z_j·P − d_j·pk_j, then recompute d_j
        let l_j = m.mul_gen(&req.z_j) - m.mul(&pk_j.g1, &req.d_j);
        let d_check = m.h0(
            &Encoder::new()
                .digest(&req.guti)
                .g1(&l_j)
                .digest(&req.id_j)
                .bytes(&req.w1)
                .nonce(req.nonce_plus_1),
        );
        if d_check != req.d_j {
            return Err(Rejection::Signature);
        }

        let shared = m.mul(&l_j, &self.keys.sk);
        let mask = m.mask(HashFn::H1, &Encoder::new().g1(&shared), req.w1.len());
        let mut u_bytes = req.w1.clone();
        crate::crypto::xor_into(&mut u_bytes, &mask);
        let u_i = GtValue::from_bytes(&u_bytes).map_err(|_| Rejection::Token)?;

        let sub = self.subscribers.get(&req.guti).ok_or(Rejection::UnknownEntity)?;
        let nonce = req.nonce_plus_1.wrapping_sub(1);
        let t_i = m.h5(&Encoder::new().bytes(&sub.k_seaf.xor_nonce(nonce)));
        let d_i = m.mul(&pk_j.g1, &t_i);
        if m.pairing(&d_i, &sub.pk_i.g2) != u_i {
            return Err(Rejection::Token);
        }

        let (delta, r, big_r) =
            make_delegation(&self.keys.sk, &self.x, &req.guti, &req.id_j, &pk_j.g1, &mut m, rng);
        let blind = m.mul(&pk_j.g1, &r);
        let mask = m.mask(
            HashFn::H2,
            &Encoder::new().g1(&blind).nonce(req.nonce_plus_1.wrapping_add(1)),
            SCALAR_BYTES,
        );
        let delta_p = m.mul_gen(&delta);
        self.seen_nonces.insert(req.nonce_plus_1);
        let (supi, k_seaf) = (sub.supi, sub.k_seaf);
        self.issued.insert(
            req.id_j,
            IssuedDelegation {
                supi,
                k_seaf,
                delta_p,
            },
        );
        Ok(DelegationResponse {
            r_j: big_r,
            w2: xor_scalar(&delta, &mask),
        })
    }

    /// Source side of the inter-AMF handover: the context sent over N14.
    pub fn transfer_context(&self, id_j: &Digest) -> Option<ContextTransfer> {
        let d = self.issued.get(id_j)?;
        Some(ContextTransfer {
            supi: d.supi,
            k_seaf: d.k_seaf,
            id_j: *id_j,
            delta_p: d.delta_p,
        })
    }

    /// Target side: derives `k_SEAF* = KDF(k_SEAF, SUPI, ID_a2)` and `GUTI* = H4(SUPI, k_SEAF*)`.
    pub fn accept_context(
        &mut self,
        ctx: &ContextTransfer,
        dir: &KeyDirectory,
    ) -> Result<TransferredContext, Rejection> {
        let pk_i = *dir.device(&ctx.supi).ok_or(Rejection::UnknownEntity)?;
        if !self.seen_contexts.insert(ctx.encode().bytes) {
            return Err(Rejection::Freshness);
        }
        let mut m = self.tally.meter(Phase::InterAmf);
        let k_star = m.kdf_anchor(&ctx.k_seaf, &ctx.supi.0, &self.keys.id.0);
        let guti_star = m.h4(&Encoder::new().digest(&ctx.supi).bytes(&k_star.0));
        let stored = TransferredContext {
            supi: ctx.supi,
            id_j: ctx.id_j,
            k_seaf: k_star,
            guti: guti_star,
            delta_p: ctx.delta_p,
        };
        self.contexts.insert(ctx.id_j, stored.clone());
        self.subscribers.insert(
            guti_star,
            SubscriberRecord {
                supi: ctx.supi,
                k_seaf: k_star,
                pk_i,
            },
        );
        Ok(stored)
    }

    /// Verifies `(ID_j, v_j, μ_j, TS6)` against the transferred `δ_j·P` and issues `δ_j*`.
    pub fn issue_inter_delegation<R: RngCore + CryptoRng>(
        &mut self,
        req: &InterDelegationRequest,
        dir: &KeyDirectory,
        clock: &Clock,
        rng: &mut R,
    ) -> Result<InterDelegationResponse, Rejection> {
        clock.check(req.ts6)?;
        let frame = req.encode().bytes;
        if self.seen_inter.contains(&frame) {
            return Err(Rejection::Freshness);
        }
        let ctx = self.contexts.get(&req.id_j).ok_or(Rejection::UnknownEntity)?.clone();
        let pk_j = *dir.twin(&req.id_j).ok_or(Rejection::UnknownEntity)?;
        let mut m = self.tally.meter(Phase::InterAmf);

        let mu = req.mu_j.to_scalar();
        let l_star = m.mul_gen(&req.v_j) - ctx.delta_p - m.mul(&pk_j.g1, &mu);
        let mu_check = m.h2(
            &Encoder::new()
                .g1(&l_star)
                .digest(&req.id_j)
                .digest(&ctx.guti)
                .timestamp(req.ts6),
        );
        if mu_check != req.mu_j {
            return Err(Rejection::Signature);
        }

        let (delta, r, big_r) =
            make_delegation(&self.keys.sk, &self.x, &ctx.guti, &req.id_j, &pk_j.g1, &mut m, rng);
        let ts7 = clock.timestamp();
        let blind = m.mul(&pk_j.g1, &r);
        let mask = m.mask(HashFn::H2, &Encoder::new().g1(&blind).timestamp(ts7), SCALAR_BYTES);
        let delta_p = m.mul_gen(&delta);
        self.seen_inter.insert(frame);
        self.issued.insert(
            req.id_j,
            IssuedDelegation {
                supi: ctx.supi,
                k_seaf: ctx.k_seaf,
                delta_p,
            },
        );
        Ok(InterDelegationResponse {
            w3: xor_scalar(&delta, &mask),
            r_j: big_r,
            ts7,
        })
    }

    /// Issues a delegation without a request, for property tests of the public check.
    pub fn issue_delegation_direct<R: RngCore + CryptoRng>(
        &mut self,
        guti: &Digest,
        id_j: &Digest,
        pk_j: &PointG1,
        rng: &mut R,
    ) -> (Scalar, PointG1) {
        let mut m = self.tally.meter(Phase::Delegation);
        let (delta, _, big_r) = make_delegation(&self.keys.sk, &self.x, guti, id_j, pk_j, &mut m, rng);
        (delta, big_r)
    }
}
