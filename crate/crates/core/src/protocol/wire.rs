//! Wire framing: `tag ‖ fields`, fixed-width fields raw, variable-width
//! fields prefixed with a 16-bit length.

use serde::{Deserialize, Serialize};

use super::Rejection;
use crate::crypto::{Digest, PointG1, Scalar, DIGEST_BYTES, G1_BYTES, SCALAR_BYTES};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
#[repr(u8)]
pub enum MessageKind {
    AuthorizedToken = 1,
    DelegationRequest = 2,
    DelegationResponse = 3,
    HandoverRequest = 4,
    HandoverResponse = 5,
    HandoverNotification = 6,
    HandoverAck = 7,
    ContextTransfer = 8,
    AnchorUpdate = 9,
    InterDelegationRequest = 10,
    InterDelegationResponse = 11,
}

impl MessageKind {
    pub const ALL: [MessageKind; 11] = [
        MessageKind::AuthorizedToken,
        MessageKind::DelegationRequest,
        MessageKind::DelegationResponse,
        MessageKind::HandoverRequest,
        MessageKind::HandoverResponse,
        MessageKind::HandoverNotification,
        MessageKind::HandoverAck,
        MessageKind::ContextTransfer,
        MessageKind::AnchorUpdate,
        MessageKind::InterDelegationRequest,
        MessageKind::InterDelegationResponse,
    ];

    pub fn tag(self) -> u8 {
        self as u8
    }

    pub fn from_tag(tag: u8) -> Option<Self> {
        Self::ALL.iter().copied().find(|k| k.tag() == tag)
    }

    pub fn name(self) -> &'static str {
        match self {
            MessageKind::AuthorizedToken => "authorized-token",
            MessageKind::DelegationRequest => "delegation-request",
            MessageKind::DelegationResponse => "delegation-response",
            MessageKind::HandoverRequest => "handover-request",
            MessageKind::HandoverResponse => "handover-response",
            MessageKind::HandoverNotification => "handover-notification",
            MessageKind::HandoverAck => "handover-ack",
            MessageKind::ContextTransfer => "context-transfer",
            MessageKind::AnchorUpdate => "anchor-update",
            MessageKind::InterDelegationRequest => "inter-delegation-request",
            MessageKind::InterDelegationResponse => "inter-delegation-response",
        }
    }
}

/// Byte range of one named field inside a frame.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FieldSpan {
    pub name: &'static str,
    pub offset: usize,
    pub len: usize,
}

/// An encoded message.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Frame {
    pub bytes: Vec<u8>,
    pub spans: Vec<FieldSpan>,
}

impl Frame {
    pub fn from_bytes(bytes: Vec<u8>) -> Self {
        Frame {
            bytes,
            spans: Vec::new(),
        }
    }

    pub fn kind(&self) -> Option<MessageKind> {
        self.bytes.first().and_then(|t| MessageKind::from_tag(*t))
    }

    /// Payload size excluding the tag byte.
    pub fn payload_bits(&self) -> u64 {
        (self.bytes.len().saturating_sub(1) * 8) as u64
    }
}

pub struct WireWriter {
    buf: Vec<u8>,
    spans: Vec<FieldSpan>,
}

impl WireWriter {
    pub fn new(kind: MessageKind) -> Self {
        WireWriter {
            buf: vec![kind.tag()],
            spans: Vec::new(),
        }
    }

    pub fn fixed(&mut self, name: &'static str, bytes: &[u8]) -> &mut Self {
        self.spans.push(FieldSpan {
            name,
            offset: self.buf.len(),
            len: bytes.len(),
        });
        self.buf.extend_from_slice(bytes);
        self
    }

    pub fn var(&mut self, name: &'static str, bytes: &[u8]) -> &mut Self {
        let len = u16::try_from(bytes.len()).expect("variable field under 64 KiB");
        self.buf.extend_from_slice(&len.to_be_bytes());
        self.fixed(name, bytes)
    }

    pub fn finish(self) -> Frame {
        Frame {
            bytes: self.buf,
            spans: self.spans,
        }
    }
}

pub struct WireReader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> WireReader<'a> {
    pub fn new(bytes: &'a [u8], kind: MessageKind) -> Result<Self, Rejection> {
        match bytes.first() {
            Some(t) if *t == kind.tag() => Ok(WireReader { buf: bytes, pos: 1 }),
            _ => Err(Rejection::Malformed),
        }
    }

    pub fn take(&mut self, n: usize) -> Result<&'a [u8], Rejection> {
        let end = self.pos.checked_add(n).ok_or(Rejection::Malformed)?;
        let out = self.buf.get(self.pos..end).ok_or(Rejection::Malformed)?;
        self.pos = end;
        Ok(out)
    }

    pub fn array<const N: usize>(&mut self) -> Result<[u8; N], Rejection> {
        Ok(self.take(N)?.try_into().expect("length checked"))
    }

    pub fn var(&mut self) -> Result<&'a [u8], Rejection> {
        let len = u16::from_be_bytes(self.array::<2>()?);
        self.take(len as usize)
    }

    pub fn digest(&mut self) -> Result<Digest, Rejection> {
        Ok(Digest(self.array::<DIGEST_BYTES>()?))
    }

    pub fn scalar(&mut self) -> Result<Scalar, Rejection> {
        Scalar::from_bytes(self.take(SCALAR_BYTES)?).map_err(|_| Rejection::Malformed)
    }

    pub fn g1(&mut self) -> Result<PointG1, Rejection> {
        PointG1::from_bytes(self.take(G1_BYTES)?).map_err(|_| Rejection::Malformed)
    }

    pub fn timestamp(&mut self) -> Result<u32, Rejection> {
        Ok(u32::from_be_bytes(self.array::<4>()?))
    }

    pub fn nonce(&mut self) -> Result<u128, Rejection> {
        Ok(u128::from_be_bytes(self.array::<16>()?))
    }

    pub fn finish(self) -> Result<(), Rejection> {
        if self.pos == self.buf.len() {
            Ok(())
        } else {
            Err(Rejection::Malformed)
        }
    }
}

pub trait WireMessage: Sized {
    const KIND: MessageKind;

    fn write(&self, w: &mut WireWriter);

    fn read(r: &mut WireReader<'_>) -> Result<Self, Rejection>;

    fn encode(&self) -> Frame {
        let mut w = WireWriter::new(Self::KIND);
        self.write(&mut w);
        w.finish()
    }

    fn decode(bytes: &[u8]) -> Result<Self, Rejection> {
        let mut r = WireReader::new(bytes, Self::KIND)?;
        let m = Self::read(&mut r)?;
        r.finish()?;
        Ok(m)
    }
}
