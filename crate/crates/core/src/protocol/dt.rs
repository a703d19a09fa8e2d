use std::collections::{HashMap, HashSet};

use rand::{CryptoRng, RngCore};

use super::keys::{EntityKeys, KeyDirectory, PublishedKey};
use super::messages::{
    AnchorUpdate, AuthorizedToken, DelegationRequest, DelegationResponse, HandoverNotification,
    HandoverRequest, HandoverResponse, InterDelegationRequest, InterDelegationResponse,
};
use super::tally::{Meter, OpTally, Phase};
use super::{Clock, Rejection};
use crate::crypto::{
    aead_decrypt, Digest, Encoder, GtValue, HashFn, PointG1, Scalar, SymmetricKey, G1_BYTES,
    GT_BYTES, SCALAR_BYTES,
};

/// A verified access delegation: `δ_j` plus what a gNB needs to check it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AccessDelegation {
    pub delta: Scalar,
    pub r_j: PointG1,
    pub guti: Digest,
    pub id_j: Digest,
    pub amf: Digest,
}

/// Public check `δ·P = pk_a + h1·bpk_a + h2·R` with `h1 = H0(GUTI, R)`, `h2 = H0(ID_j, pk_j)`.
pub fn delegation_holds(
    delta: &Scalar,
    r_j: &PointG1,
    guti: &Digest,
    id_j: &Digest,
    pk_j: &PointG1,
    amf: &PublishedKey,
    m: &mut Meter<'_>,
) -> bool {
    let h1 = m.h0(&Encoder::new().digest(guti).g1(r_j));
    let h2 = m.h0(&Encoder::new().digest(id_j).g1(pk_j));
    m.mul_gen(delta) == amf.pk + m.mul(&amf.bpk, &h1) + m.mul(r_j, &h2)
}

struct PendingDelegation {
    nonce_plus_2: u128,
    guti: Digest,
    amf: Digest,
}

struct PendingHandover {
    b_j: Scalar,
}

struct PendingInter {
    guti_star: Digest,
    amf: Digest,
}

/// The twin acting for one MD.
pub struct DigitalTwin {
    keys: EntityKeys,
    k_ij: SymmetricKey,
    a_i: Option<PointG1>,
    seen_nonces: HashSet<u128>,
    pending_delegation: Option<PendingDelegation>,
    delegation: Option<AccessDelegation>,
    pending_handovers: HashMap<Digest, PendingHandover>,
    drawn: Vec<Scalar>,
    pending_inter: Option<PendingInter>,
    seen_frames: HashSet<Vec<u8>>,
    pub tally: OpTally,
}

impl DigitalTwin {
    /// `id_j` is the anonymous identity allocated by the AUSF.
    pub fn new<R: RngCore + CryptoRng>(id_j: Digest, k_ij: SymmetricKey, rng: &mut R) -> Self {
        DigitalTwin {
            keys: EntityKeys::generate(id_j, rng),
            k_ij,
            a_i: None,
            seen_nonces: HashSet::new(),
            pending_delegation: None,
            delegation: None,
            pending_handovers: HashMap::new(),
            drawn: Vec::new(),
            pending_inter: None,
            seen_frames: HashSet::new(),
            tally: OpTally::default(),
        }
    }

    pub fn id(&self) -> Digest {
        self.keys.id
    }

    pub fn public_key(&self) -> crate::crypto::DualPublicKey {
        self.keys.pk
    }

    pub fn delegation(&self) -> Option<&AccessDelegation> {
        self.delegation.as_ref()
    }

    /// Decrypts and checks the MD's token, then builds the delegation request for `amf`.
    pub fn handle_token<R: RngCore + CryptoRng>(
        &mut self,
        token: &AuthorizedToken,
        amf: &Digest,
        dir: &KeyDirectory,
        rng: &mut R,
    ) -> Result<DelegationRequest, Rejection> {
        let amf_key = *dir.amf(amf).ok_or(Rejection::UnknownEntity)?;
        let plain =
            aead_decrypt(&self.k_ij, &token.e1, b"authorized-token").map_err(|_| Rejection::Decryption)?;
        if plain.len() != G1_BYTES + GT_BYTES + 16 + 16 {
            return Err(Rejection::Malformed);
        }
        let (a_bytes, rest) = plain.split_at(G1_BYTES);
        let (u_bytes, rest) = rest.split_at(GT_BYTES);
        let (guti_bytes, n_bytes) = rest.split_at(16);
        let a_i = PointG1::from_bytes(a_bytes).map_err(|_| Rejection::Malformed)?;
        let u_i = GtValue::from_bytes(u_bytes).map_err(|_| Rejection::Malformed)?;
        let guti = Digest::from_slice(guti_bytes).expect("16 bytes");
        let nonce = u128::from_be_bytes(n_bytes.try_into().expect("16 bytes"));

        let mut m = self.tally.meter(Phase::Delegation);
        let mac = m.h3(
            &Encoder::new()
                .bytes(&self.k_ij.0)
                .g1(&a_i)
                .gt(&u_i)
                .digest(&guti)
                .nonce(nonce),
        );
        if mac != token.mac1 {
            return Err(Rejection::Mac);
        }
        if !self.seen_nonces.insert(nonce) {
            return Err(Rejection::Freshness);
        }

        let l = Scalar::random(rng);
        let l_j = m.mul_gen(&l);
        let shared = m.mul(&amf_key.pk, &l);
        let mask = m.mask(HashFn::H1, &Encoder::new().g1(&shared), GT_BYTES);
        let mut w1 = u_i.to_bytes();
        crate::crypto::xor_into(&mut w1, &mask);
        let nonce_plus_1 = nonce.wrapping_add(1);
        let d_j = m.h0(
            &Encoder::new()
                .digest(&guti)
                .g1(&l_j)
                .digest(&self.keys.id)
                .bytes(&w1)
                .nonce(nonce_plus_1),
        );
        let z_j = l + self.keys.sk * d_j;

        self.a_i = Some(a_i);
        self.pending_delegation = Some(PendingDelegation {
            nonce_plus_2: nonce.wrapping_add(2),
            guti,
            amf: *amf,
        });
        Ok(DelegationRequest {
            guti,
            id_j: self.keys.id,
            w1,
            z_j,
            d_j,
            nonce_plus_1,
        })
    }

    fn unmask_delegation(&self, w: &[u8; SCALAR_BYTES], mask: &[u8]) -> Result<Scalar, Rejection> {
        let mut bytes = *w;
        crate::crypto::xor_into(&mut bytes, mask);
        Scalar::from_bytes(&bytes).map_err(|_| Rejection::Signature)
    }

    /// Recovers `δ_j` from `(R_j, w2)` and checks it against the AMF's published keys.
    pub fn unwrap_delegation(
        &mut self,
        resp: &DelegationResponse,
        dir: &KeyDirectory,
    ) -> Result<AccessDelegation, Rejection> {
        let pending = self.pending_delegation.as_ref().ok_or(Rejection::Unexpected)?;
        let amf_key = *dir.amf(&pending.amf).ok_or(Rejection::UnknownEntity)?;
        let (guti, amf, n2) = (pending.guti, pending.amf, pending.nonce_plus_2);
        let mut m = self.tally.meter(Phase::Delegation);
        let shared = m.mul(&resp.r_j, &self.keys.sk);
        let mask = m.mask(HashFn::H2, &Encoder::new().g1(&shared).nonce(n2), SCALAR_BYTES);
        let delta = self.unmask_delegation(&resp.w2, &mask)?;
        let mut m = self.tally.meter(Phase::Delegation);
        if !delegation_holds(&delta, &resp.r_j, &guti, &self.keys.id, &self.keys.pk.g1, &amf_key, &mut m) {
            return Err(Rejection::Signature);
        }
        let d = AccessDelegation {
            delta,
            r_j: resp.r_j,
            guti,
            id_j: self.keys.id,
            amf,
        };
        self.pending_delegation = None;
        self.delegation = Some(d);
        Ok(d)
    }

    /// Builds `(GUTI, ID_j, λ_j, A_i, B_j, R_j, TS1)` for a predicted target gNB.
    pub fn make_handover_request<R: RngCore + CryptoRng>(
        &mut self,
        target: &Digest,
        dir: &KeyDirectory,
        clock: &Clock,
        rng: &mut R,
    ) -> Result<HandoverRequest, Rejection> {
        let d = self.delegation.ok_or(Rejection::Unexpected)?;
        let a_i = self.a_i.ok_or(Rejection::Unexpected)?;
        let pk_g2 = dir.gnb(target).ok_or(Rejection::UnknownEntity)?.pk;
        let mut m = self.tally.meter(Phase::HandoverPrep);
        let b = Scalar::random(rng);
        let b_j = m.mul_gen(&b);
        let ts1 = clock.timestamp();
        let h3 = m.h0(&Encoder::new().g1(&a_i).timestamp(ts1));
        let z_j = m.mul(&pk_g2, &(self.keys.sk + b));
        let h4 = m.h0(&Encoder::new().g1(&z_j).digest(&d.id_j));
        let lambda = d.delta * h3 + b * h4;
        self.pending_handovers.insert(*target, PendingHandover { b_j: b });
        self.drawn.push(b);
        Ok(HandoverRequest {
            guti: d.guti,
            id_j: d.id_j,
            lambda,
            a_i,
            b_j,
            r_j: d.r_j,
            ts1,
        })
    }

    /// Checks the gNB's MAC2 and relays `(C_g2, ID_g2, h6, TS3)` to the MD.
    pub fn handle_handover_response(
        &mut self,
        resp: &HandoverResponse,
        dir: &KeyDirectory,
        clock: &Clock,
    ) -> Result<HandoverNotification, Rejection> {
        clock.check(resp.ts2)?;
        let pending = self
            .pending_handovers
            .get(&resp.id_g2)
            .ok_or(Rejection::Unexpected)?;
        let pk_g2 = dir.gnb(&resp.id_g2).ok_or(Rejection::UnknownEntity)?.pk;
        let mut m = self.tally.meter(Phase::HandoverPrep);
        let shared = m.mul(&pk_g2, &(pending.b_j * resp.h5));
        let mac2 = m.h2(&Encoder::new().g1(&shared).g1(&resp.c_g2).timestamp(resp.ts2));
        if mac2 != resp.mac2 {
            return Err(Rejection::Mac);
        }
        let ts3 = clock.timestamp();
        let h5_c = m.mul(&resp.c_g2, &resp.h5);
        let mac3 = m.h2(
            &Encoder::new()
                .bytes(&self.k_ij.0)
                .g1(&h5_c)
                .digest(&resp.id_g2)
                .timestamp(ts3),
        );
        // b_j is single-use
        self.pending_handovers.remove(&resp.id_g2);
        Ok(HandoverNotification {
            c_g2: resp.c_g2,
            id_g2: resp.id_g2,
            h6: Digest(resp.h5.low_128()) ^ mac3,
            ts3,
        })
    }

    /// Accepts the MD's `(E2, MAC5)` and requests a new delegation from the target AMF.
    pub fn handle_anchor_update<R: RngCore + CryptoRng>(
        &mut self,
        upd: &AnchorUpdate,
        target_amf: &Digest,
        clock: &Clock,
        rng: &mut R,
    ) -> Result<InterDelegationRequest, Rejection> {
        let d = self.delegation.ok_or(Rejection::Unexpected)?;
        let plain = aead_decrypt(&self.k_ij, &upd.e2, b"anchor-update").map_err(|_| Rejection::Decryption)?;
        if plain.len() != 16 + 4 {
            return Err(Rejection::Malformed);
        }
        let guti_star = Digest::from_slice(&plain[..16]).expect("16 bytes");
        let ts5 = u32::from_be_bytes(plain[16..].try_into().expect("4 bytes"));
        let mut m = self.tally.meter(Phase::InterAmf);
        let mac5 = m.h4(&Encoder::new().bytes(&self.k_ij.0).digest(&guti_star).timestamp(ts5));
        if mac5 != upd.mac5 {
            return Err(Rejection::Mac);
        }
        clock.check(ts5)?;
        if !self.seen_frames.insert(upd.e2.clone()) {
            return Err(Rejection::Freshness);
        }

        let l = Scalar::random(rng);
        let l_star = m.mul_gen(&l);
        let ts6 = clock.timestamp();
        let mu_j = m.h2(
            &Encoder::new()
                .g1(&l_star)
                .digest(&d.id_j)
                .digest(&guti_star)
                .timestamp(ts6),
        );
        let v_j = d.delta + l + mu_j.to_scalar() * self.keys.sk;
        self.pending_inter = Some(PendingInter {
            guti_star,
            amf: *target_amf,
        });
        Ok(InterDelegationRequest {
            id_j: d.id_j,
            v_j,
            mu_j,
            ts6,
        })
    }

    /// Recovers and checks `δ_j*` issued by the target AMF.
    pub fn unwrap_inter_delegation(
        &mut self,
        resp: &InterDelegationResponse,
        dir: &KeyDirectory,
        clock: &Clock,
    ) -> Result<AccessDelegation, Rejection> {
        clock.check(resp.ts7)?;
        let pending = self.pending_inter.as_ref().ok_or(Rejection::Unexpected)?;
        let (guti, amf) = (pending.guti_star, pending.amf);
        let amf_key = *dir.amf(&amf).ok_or(Rejection::UnknownEntity)?;
        let mut m = self.tally.meter(Phase::InterAmf);
        let shared = m.mul(&resp.r_j, &self.keys.sk);
        let mask = m.mask(HashFn::H2, &Encoder::new().g1(&shared).timestamp(resp.ts7), SCALAR_BYTES);
        let delta = self.unmask_delegation(&resp.w3, &mask)?;
        let mut m = self.tally.meter(Phase::InterAmf);
        if !delegation_holds(&delta, &resp.r_j, &guti, &self.keys.id, &self.keys.pk.g1, &amf_key, &mut m) {
            return Err(Rejection::Signature);
        }
        let d = AccessDelegation {
            delta,
            r_j: resp.r_j,
            guti,
            id_j: self.keys.id,
            amf,
        };
        self.pending_inter = None;
        self.delegation = Some(d);
        Ok(d)
    }

    /// Every secret scalar the twin currently holds.
    pub fn held_scalars(&self) -> Vec<Scalar> {
        let mut out = vec![self.keys.sk];
        if let Some(d) = &self.delegation {
            out.push(d.delta);
        }
        out.extend(self.pending_handovers.values().map(|p| p.b_j));
        out
    }

    /// Every ephemeral `b_j` drawn so far, including spent ones (exposed for leakage experiments).
    pub fn ephemerals(&self) -> Vec<Scalar> {
        self.drawn.clone()
    }

    /// Every group element the twin currently holds.
    pub fn held_points(&self) -> Vec<PointG1> {
        let mut out = vec![self.keys.pk.g1];
        out.extend(self.a_i);
        if let Some(d) = &self.delegation {
            out.push(d.r_j);
        }
        out
    }

    /// Long-term `sk_j` (exposed for leakage experiments).
    pub fn long_term(&self) -> Scalar {
        self.keys.sk
    }

    pub fn k_ij(&self) -> SymmetricKey {
        self.k_ij
    }
}
