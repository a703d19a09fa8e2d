//! Protocol messages and their wire layouts.

use super::wire::{MessageKind, WireMessage, WireReader, WireWriter};
use super::Rejection;
use crate::crypto::{AnchorKey, Digest, PointG1, Scalar, GT_BYTES, SCALAR_BYTES};

/// MD → DT: `(E1, MAC1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AuthorizedToken {
    pub e1: Vec<u8>,
    pub mac1: Digest,
}

impl WireMessage for AuthorizedToken {
    const KIND: MessageKind = MessageKind::AuthorizedToken;

    fn write(&self, w: &mut WireWriter) {
        w.var("E1", &self.e1).fixed("MAC1", &self.mac1.0);
    }

    fn read(r: &mut WireReader<'_>) -> Result<Self, Rejection> {
        Ok(AuthorizedToken {
            e1: r.var()?.to_vec(),
            mac1: r.digest()?,
        })
    }
}

/// DT → AMF: `(GUTI, ID_j, w1, z_j, d_j, N_i+1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DelegationRequest {
    pub guti: Digest,
    pub id_j: Digest,
    pub w1: Vec<u8>,
    pub z_j: Scalar,
    pub d_j: Scalar,
    pub nonce_plus_1: u128,
}

impl WireMessage for DelegationRequest {
    const KIND: MessageKind = MessageKind::DelegationRequest;

    fn write(&self, w: &mut WireWriter) {
        w.fixed("GUTI", &self.guti.0)
            .fixed("ID_j", &self.id_j.0)
            .fixed("w1", &self.w1)
            .fixed("z_j", &self.z_j.to_bytes())
            .fixed("d_j", &self.d_j.to_bytes())
            .fixed("N+1", &self.nonce_plus_1.to_be_bytes());
    }

    fn read(r: &mut WireReader<'_>) -> Result<Self, Rejection> {
        Ok(DelegationRequest {
            guti: r.digest()?,
            id_j: r.digest()?,
            w1: r.take(GT_BYTES)?.to_vec(),
            z_j: r.scalar()?,
            d_j: r.scalar()?,
            nonce_plus_1: r.nonce()?,
        })
    }
}

/// AMF → DT: `(R_j, w2)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DelegationResponse {
    pub r_j: PointG1,
    pub w2: [u8; SCALAR_BYTES],
}

impl WireMessage for DelegationResponse {
    const KIND: MessageKind = MessageKind::DelegationResponse;

    fn write(&self, w: &mut WireWriter) {
        w.fixed("R_j", &self.r_j.to_bytes()).fixed("w2", &self.w2);
    }

    fn read(r: &mut WireReader<'_>) -> Result<Self, Rejection> {
        Ok(DelegationResponse {
            r_j: r.g1()?,
            w2: r.array()?,
        })
    }
}

/// DT → gNB: `(GUTI, ID_j, λ_j, A_i, B_j, R_j, TS1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HandoverRequest {
    pub guti: Digest,
    pub id_j: Digest,
    pub lambda: Scalar,
    pub a_i: PointG1,
    pub b_j: PointG1,
    pub r_j: PointG1,
    pub ts1: u32,
}

impl WireMessage for HandoverRequest {
    const KIND: MessageKind = MessageKind::HandoverRequest;

    fn write(&self, w: &mut WireWriter) {
        w.fixed("GUTI", &self.guti.0)
            .fixed("ID_j", &self.id_j.0)
            .fixed("lambda_j", &self.lambda.to_bytes())
            .fixed("A_i", &self.a_i.to_bytes())
            .fixed("B_j", &self.b_j.to_bytes())
            .fixed("R_j", &self.r_j.to_bytes())
            .fixed("TS1", &self.ts1.to_be_bytes());
    }

    fn read(r: &mut WireReader<'_>) -> Result<Self, Rejection> {
        Ok(HandoverRequest {
            guti: r.digest()?,
            id_j: r.digest()?,
            lambda: r.scalar()?,
            a_i: r.g1()?,
            b_j: r.g1()?,
            r_j: r.g1()?,
            ts1: r.timestamp()?,
        })
    }
}

/// gNB → DT: `(ID_g2, C_g2, h5, MAC2, TS2)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HandoverResponse {
    pub id_g2: Digest,
    pub c_g2: PointG1,
    pub h5: Scalar,
    pub mac2: Digest,
    pub ts2: u32,
}

impl WireMessage for HandoverResponse {
    const KIND: MessageKind = MessageKind::HandoverResponse;

    fn write(&self, w: &mut WireWriter) {
        w.fixed("ID_g2", &self.id_g2.0)
            .fixed("C_g2", &self.c_g2.to_bytes())
            .fixed("h5", &self.h5.to_bytes())
            .fixed("MAC2", &self.mac2.0)
            .fixed("TS2", &self.ts2.to_be_bytes());
    }

    fn read(r: &mut WireReader<'_>) -> Result<Self, Rejection> {
        Ok(HandoverResponse {
            id_g2: r.digest()?,
            c_g2: r.g1()?,
            h5: r.scalar()?,
            mac2: r.digest()?,
            ts2: r.timestamp()?,
        })
    }
}

/// DT → MD: `(C_g2, ID_g2, h6, TS3)`; 544 bits of payload.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HandoverNotification {
    pub c_g2: PointG1,
    pub id_g2: Digest,
    pub h6: Digest,
    pub ts3: u32,
}

impl WireMessage for HandoverNotification {
    const KIND: MessageKind = MessageKind::HandoverNotification;

    fn write(&self, w: &mut WireWriter) {
        w.fixed("C_g2", &self.c_g2.to_bytes())
            .fixed("ID_g2", &self.id_g2.0)
            .fixed("h6", &self.h6.0)
            .fixed("TS3", &self.ts3.to_be_bytes());
    }

    fn read(r: &mut WireReader<'_>) -> Result<Self, Rejection> {
        Ok(HandoverNotification {
            c_g2: r.g1()?,
            id_g2: r.digest()?,
            h6: r.digest()?,
            ts3: r.timestamp()?,
        })
    }
}

/// MD → gNB: `(TID_i, MAC4, TS4)`; 288 bits of payload.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HandoverAck {
    pub tid: Digest,
    pub mac4: Digest,
    pub ts4: u32,
}

impl WireMessage for HandoverAck {
    const KIND: MessageKind = MessageKind::HandoverAck;

    fn write(&self, w: &mut WireWriter) {
        w.fixed("TID_i", &self.tid.0)
            .fixed("MAC4", &self.mac4.0)
            .fixed("TS4", &self.ts4.to_be_bytes());
    }

    fn read(r: &mut WireReader<'_>) -> Result<Self, Rejection> {
        Ok(HandoverAck {
            tid: r.digest()?,
            mac4: r.digest()?,
            ts4: r.timestamp()?,
        })
    }
}

/// AMF1 → AMF2 over N14: `(SUPI, k_SEAF, ID_j, δ_j·P)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContextTransfer {
    pub supi: Digest,
    pub k_seaf: AnchorKey,
    pub id_j: Digest,
    pub delta_p: PointG1,
}

impl WireMessage for ContextTransfer {
    const KIND: MessageKind = MessageKind::ContextTransfer;

    fn write(&self, w: &mut WireWriter) {
        w.fixed("SUPI", &self.supi.0)
            .fixed("k_SEAF", &self.k_seaf.0)
            .fixed("ID_j", &self.id_j.0)
            .fixed("delta_j*P", &self.delta_p.to_bytes());
    }

    fn read(r: &mut WireReader<'_>) -> Result<Self, Rejection> {
        Ok(ContextTransfer {
            supi: r.digest()?,
            k_seaf: AnchorKey(r.array()?),
            id_j: r.digest()?,
            delta_p: r.g1()?,
        })
    }
}

/// MD → DT: `(E2, MAC5)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnchorUpdate {
    pub e2: Vec<u8>,
    pub mac5: Digest,
}

impl WireMessage for AnchorUpdate {
    const KIND: MessageKind = MessageKind::AnchorUpdate;

    fn write(&self, w: &mut WireWriter) {
        w.var("E2", &self.e2).fixed("MAC5", &self.mac5.0);
    }

    fn read(r: &mut WireReader<'_>) -> Result<Self, Rejection> {
        Ok(AnchorUpdate {
            e2: r.var()?.to_vec(),
            mac5: r.digest()?,
        })
    }
}

/// DT → AMF2: `(ID_j, v_j, μ_j, TS6)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InterDelegationRequest {
    pub id_j: Digest,
    pub v_j: Scalar,
    pub mu_j: Digest,
    pub ts6: u32,
}

impl WireMessage for InterDelegationRequest {
    const KIND: MessageKind = MessageKind::InterDelegationRequest;

    fn write(&self, w: &mut WireWriter) {
        w.fixed("ID_j", &self.id_j.0)
            .fixed("v_j", &self.v_j.to_bytes())
            .fixed("mu_j", &self.mu_j.0)
            .fixed("TS6", &self.ts6.to_be_bytes());
    }

    fn read(r: &mut WireReader<'_>) -> Result<Self, Rejection> {
        Ok(InterDelegationRequest {
            id_j: r.digest()?,
            v_j: r.scalar()?,
            mu_j: r.digest()?,
            ts6: r.timestamp()?,
        })
    }
}

/// AMF2 → DT: `(w3, R_j*, TS7)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InterDelegationResponse {
    pub w3: [u8; SCALAR_BYTES],
    pub r_j: PointG1,
    pub ts7: u32,
}

impl WireMessage for InterDelegationResponse {
    const KIND: MessageKind = MessageKind::InterDelegationResponse;

    fn write(&self, w: &mut WireWriter) {
        w.fixed("w3", &self.w3)
            .fixed("R_j*", &self.r_j.to_bytes())
            .fixed("TS7", &self.ts7.to_be_bytes());
    }

    fn read(r: &mut WireReader<'_>) -> Result<Self, Rejection> {
        Ok(InterDelegationResponse {
            w3: r.array()?,
            r_j: r.g1()?,
            ts7: r.timestamp()?,
        })
    }
}

/// Every G1 element a frame carries in clear; empty if the frame does not decode.
pub fn group_elements(kind: MessageKind, bytes: &[u8]) -> Vec<PointG1> {
    let points = match kind {
        MessageKind::DelegationResponse => DelegationResponse::decode(bytes).map(|m| vec![m.r_j]),
        MessageKind::HandoverRequest => HandoverRequest::decode(bytes).map(|m| vec![m.a_i, m.b_j, m.r_j]),
        MessageKind::HandoverResponse => HandoverResponse::decode(bytes).map(|m| vec![m.c_g2]),
        MessageKind::HandoverNotification => HandoverNotification::decode(bytes).map(|m| vec![m.c_g2]),
        MessageKind::ContextTransfer => ContextTransfer::decode(bytes).map(|m| vec![m.delta_p]),
        MessageKind::InterDelegationResponse => InterDelegationResponse::decode(bytes).map(|m| vec![m.r_j]),
        _ => Ok(Vec::new()),
    };
    points.unwrap_or_default()
}
