use std::collections::HashMap;

use rand::{CryptoRng, RngCore};

use super::keys::EntityKeys;
use super::messages::{AnchorUpdate, AuthorizedToken, HandoverAck, HandoverNotification};
use super::tally::{OpTally, Phase};
use super::{Clock, Rejection};
use crate::crypto::{
    aead_encrypt, AnchorKey, Digest, DualPublicKey, Encoder, PointG2, Scalar, SymmetricKey,
};

/// Session keys agreed with one gNB.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SessionKeys {
    pub gnb: Digest,
    pub guti: Digest,
    pub k_i: crate::crypto::PointG1,
    pub k_gnb: Digest,
    pub tck: SymmetricKey,
    pub tik: SymmetricKey,
    pub tid: Digest,
}

pub struct MobileDevice {
    supi: Digest,
    keys: EntityKeys,
    k_ij: SymmetricKey,
    id_j: Digest,
    dt_pk: DualPublicKey,
    k_seaf: Option<AnchorKey>,
    guti: Option<Digest>,
    a_i: Option<Scalar>,
    prepared: HashMap<Digest, SessionKeys>,
    established: Vec<SessionKeys>,
    pub tally: OpTally,
}

impl MobileDevice {
    pub fn new<R: RngCore + CryptoRng>(supi: Digest, rng: &mut R) -> Self {
        MobileDevice {
            supi,
            keys: EntityKeys::generate(supi, rng),
            k_ij: SymmetricKey([0; 16]),
            id_j: Digest::default(),
            dt_pk: DualPublicKey {
                g1: crate::crypto::PointG1::identity(),
                g2: PointG2::identity(),
            },
            k_seaf: None,
            guti: None,
            a_i: None,
            prepared: HashMap::new(),
            established: Vec::new(),
            tally: OpTally::default(),
        }
    }

    pub fn supi(&self) -> Digest {
        self.supi
    }

    pub fn public_key(&self) -> DualPublicKey {
        self.keys.pk
    }

    /// Binds the device to its twin: `ID_j`, `pk_j`, and the shared `k_ij`.
    pub fn pair_twin(&mut self, id_j: Digest, dt_pk: DualPublicKey, k_ij: SymmetricKey) {
        self.id_j = id_j;
        self.dt_pk = dt_pk;
        self.k_ij = k_ij;
    }

    /// Result of the initial 5G-AKA attach.
    pub fn attach(&mut self, k_seaf: AnchorKey, guti: Digest) {
        self.k_seaf = Some(k_seaf);
        self.guti = Some(guti);
    }

    pub fn guti(&self) -> Option<Digest> {
        self.guti
    }

    pub fn k_seaf(&self) -> Option<AnchorKey> {
        self.k_seaf
    }

    pub fn prepared(&self, gnb: &Digest) -> Option<&SessionKeys> {
        self.prepared.get(gnb)
    }

    pub fn established(&self) -> &[SessionKeys] {
        &self.established
    }

    /// Ephemeral `a_i` (exposed for leakage experiments).
    pub fn ephemeral(&self) -> Option<Scalar> {
        self.a_i
    }

    /// Long-term `sk_i` (exposed for leakage experiments).
    pub fn long_term(&self) -> Scalar {
        self.keys.sk
    }

    /// Builds the authorized token `(E1, MAC1)` for the twin.
    pub fn make_token<R: RngCore + CryptoRng>(&mut self, rng: &mut R) -> Result<AuthorizedToken, Rejection> {
        let k_seaf = self.k_seaf.ok_or(Rejection::Unexpected)?;
        let guti = self.guti.ok_or(Rejection::Unexpected)?;
        let mut m = self.tally.meter(Phase::Delegation);
        let a = Scalar::random(rng);
        let a_i = m.mul(&self.keys.pk.g1, &a);
        let nonce = u128::from_be_bytes({
            let mut b = [0u8; 16];
            rng.fill_bytes(&mut b);
            b
        });
        let t_i = m.h5(&Encoder::new().bytes(&k_seaf.xor_nonce(nonce)));
        let d_i = m.mul(&self.dt_pk.g1, &t_i);
        let signed = m.mul(&d_i, &self.keys.sk);
        let u_i = m.pairing(&signed, &PointG2::generator());

        let mut plain = a_i.to_bytes().to_vec();
        plain.extend_from_slice(&u_i.to_bytes());
        plain.extend_from_slice(&guti.0);
        plain.extend_from_slice(&nonce.to_be_bytes());
        let e1 = aead_encrypt(&self.k_ij, &plain, b"authorized-token", rng);
        let mac1 = m.h3(
            &Encoder::new()
                .bytes(&self.k_ij.0)
                .g1(&a_i)
                .gt(&u_i)
                .digest(&guti)
                .nonce(nonce),
        );
        self.a_i = Some(a);
        Ok(AuthorizedToken { e1, mac1 })
    }

    /// Derives the session keys from the twin's notification and checks MAC3.
    /// A rejection means the device must fall back to the standard procedure.
    pub fn process_notification(
        &mut self,
        n: &HandoverNotification,
        clock: &Clock,
    ) -> Result<SessionKeys, Rejection> {
        clock.check(n.ts3)?;
        let a = self.a_i.ok_or(Rejection::Unexpected)?;
        let guti = self.guti.ok_or(Rejection::Unexpected)?;
        let mut m = self.tally.meter(Phase::HandoverPrep);
        let k_i = m.mul(&n.c_g2, &(a * self.keys.sk));
        let k_gnb = m.h2(&Encoder::new().g1(&k_i).digest(&guti).digest(&n.id_g2));
        let tid = m.h4(&Encoder::new().digest(&k_gnb).digest(&guti).digest(&n.id_g2));
        let tck = m.kdf(&k_gnb.0, b"Enc");
        let tik = m.kdf(&k_gnb.0, b"Int");
        let h5 = m.h5(&Encoder::new().bytes(&tik.0).digest(&tid).digest(&self.id_j));
        let mac3 = n.h6 ^ Digest(h5.low_128());
        let h5_c = m.mul(&n.c_g2, &h5);
        let expected = m.h2(
            &Encoder::new()
                .bytes(&self.k_ij.0)
                .g1(&h5_c)
                .digest(&n.id_g2)
                .timestamp(n.ts3),
        );
        if mac3 != expected {
            return Err(Rejection::Mac);
        }
        let keys = SessionKeys {
            gnb: n.id_g2,
            guti,
            k_i,
            k_gnb,
            tck,
            tik,
            tid,
        };
        self.prepared.insert(n.id_g2, keys.clone());
        Ok(keys)
    }

    /// On entering the target cell: `(TID_i, MAC4, TS4)`, or `None` when no
    /// keys were prepared for that gNB.
    pub fn acknowledge(&mut self, gnb: &Digest, clock: &Clock) -> Option<HandoverAck> {
        let keys = self.prepared.remove(gnb)?;
        let ts4 = clock.timestamp();
        let mac4 = self
            .tally
            .meter(Phase::HandoverAccess)
            .h2(&Encoder::new().bytes(&keys.tik.0).digest(&keys.tid).timestamp(ts4));
        let tid = keys.tid;
        self.established.push(keys);
        Some(HandoverAck { tid, mac4, ts4 })
    }

    /// Moves the anchor to `target_amf` and reports the new GUTI to the twin.
    pub fn update_anchor<R: RngCore + CryptoRng>(
        &mut self,
        target_amf: &Digest,
        clock: &Clock,
        rng: &mut R,
    ) -> Result<AnchorUpdate, Rejection> {
        let k_seaf = self.k_seaf.ok_or(Rejection::Unexpected)?;
        let mut m = self.tally.meter(Phase::InterAmf);
        let k_star = m.kdf_anchor(&k_seaf, &self.supi.0, &target_amf.0);
        let guti_star = m.h4(&Encoder::new().digest(&self.supi).bytes(&k_star.0));
        let ts5 = clock.timestamp();
        let mut plain = guti_star.0.to_vec();
        plain.extend_from_slice(&ts5.to_be_bytes());
        let e2 = aead_encrypt(&self.k_ij, &plain, b"anchor-update", rng);
        let mac5 = m.h4(&Encoder::new().bytes(&self.k_ij.0).digest(&guti_star).timestamp(ts5));
        self.k_seaf = Some(k_star);
        self.guti = Some(guti_star);
        Ok(AnchorUpdate { e2, mac5 })
    }
}
