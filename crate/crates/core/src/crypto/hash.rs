//! The hash family `H0..H5`, realized as one tagged hash.
//!
//! Every input is a length-prefixed concatenation of canonical field
//! encodings (see [`Encoder`]). Digest-valued members return 128 bits;
//! scalar-valued members reduce a 512-bit output mod q and never return zero.

use std::fmt;
use std::ops::BitXor;

use sha2::{Digest as _, Sha256, Sha512};

use super::group::{GtValue, PointG1, PointG2, Scalar};

/// Output width `l` of the digest-valued hashes, in bytes.
pub const DIGEST_BYTES: usize = 16;

/// A 128-bit hash output, MAC, identity, or nonce-width value.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct Digest(pub [u8; DIGEST_BYTES]);

impl Digest {
    pub fn from_slice(bytes: &[u8]) -> Option<Self> {
        <[u8; DIGEST_BYTES]>::try_from(bytes).ok().map(Digest)
    }

    pub fn as_bytes(&self) -> &[u8; DIGEST_BYTES] {
        &self.0
    }

    /// Big-endian interpretation, reduced into `Z_q` (lossless: 128 bits < q).
    pub fn to_scalar(&self) -> Scalar {
        Scalar::from_be_bytes_mod_order(&self.0)
    }
}

impl BitXor for Digest {
    type Output = Digest;
    fn bitxor(self, rhs: Digest) -> Digest {
        let mut out = self.0;
        out.iter_mut().zip(rhs.0).for_each(|(a, b)| *a ^= b);
        Digest(out)
    }
}

impl fmt::Debug for Digest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", hex::encode(self.0))
    }
}

impl fmt::Display for Digest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", hex::encode(self.0))
    }
}

/// Canonical, length-prefixed field encoder shared by every hash and MAC input.
#[derive(Clone, Default, Debug)]
pub struct Encoder {
    buf: Vec<u8>,
}

impl Encoder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn bytes(mut self, b: &[u8]) -> Self {
        self.buf.extend_from_slice(&(b.len() as u32).to_be_bytes());
        self.buf.extend_from_slice(b);
        self
    }

    pub fn g1(self, p: &PointG1) -> Self {
        self.bytes(&p.to_bytes())
    }

    pub fn g2(self, p: &PointG2) -> Self {
        self.bytes(&p.to_bytes())
    }

    pub fn gt(self, v: &GtValue) -> Self {
        self.bytes(&v.to_bytes())
    }

    pub fn scalar(self, s: &Scalar) -> Self {
        self.bytes(&s.to_bytes())
    }

    pub fn digest(self, d: &Digest) -> Self {
        self.bytes(&d.0)
    }

    /// 32-bit wire timestamp.
    pub fn timestamp(self, ts: u32) -> Self {
        self.bytes(&ts.to_be_bytes())
    }

    /// 128-bit nonce.
    pub fn nonce(self, n: u128) -> Self {
        self.bytes(&n.to_be_bytes())
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.buf
    }
}

/// Members of the hash family; the discriminant is the domain-separation tag.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum HashFn {
    H0 = 0,
    H1 = 1,
    H2 = 2,
    H3 = 3,
    H4 = 4,
    H5 = 5,
}

impl HashFn {
    pub const ALL: [HashFn; 6] = [
        HashFn::H0,
        HashFn::H1,
        HashFn::H2,
        HashFn::H3,
        HashFn::H4,
        HashFn::H5,
    ];

    fn tag(self) -> u8 {
        self as u8
    }

    /// Raw tagged evaluation; scalar members are reduced by the caller.
    pub fn digest(self, input: &[u8]) -> Digest {
        let h = Sha256::new().chain_update([self.tag()]).chain_update(input).finalize();
        let mut out = [0u8; DIGEST_BYTES];
        out.copy_from_slice(&h[..DIGEST_BYTES]);
        Digest(out)
    }

    pub fn scalar(self, input: &[u8]) -> Scalar {
        let h = Sha512::new().chain_update([self.tag()]).chain_update(input).finalize();
        let s = Scalar::from_be_bytes_mod_order(&h);
        if s.is_zero() {
            Scalar::ONE
        } else {
            s
        }
    }

    /// Output extended to `len` bytes, for XOR-blinding values wider than `l`.
    pub fn mask(self, input: &[u8], len: usize) -> Vec<u8> {
        let mut out = Vec::with_capacity(len);
        let mut counter: u32 = 0;
        while out.len() < len {
            let block = Sha256::new()
                .chain_update([self.tag() | 0x80])
                .chain_update(counter.to_be_bytes())
                .chain_update(input)
                .finalize();
            let take = (len - out.len()).min(block.len());
            out.extend_from_slice(&block[..take]);
            counter += 1;
        }
        out
    }
}

/// `H0: G × {0,1}* → Z_q*`
pub fn h0(input: &Encoder) -> Scalar {
    HashFn::H0.scalar(input.as_slice())
}

/// `H1: G → {0,1}^l`
pub fn h1(point: &PointG1) -> Digest {
    HashFn::H1.digest(Encoder::new().g1(point).as_slice())
}

/// `H2: G × {0,1}* → {0,1}^l`
pub fn h2(input: &Encoder) -> Digest {
    HashFn::H2.digest(input.as_slice())
}

/// `H3: G × G_T × {0,1}* → {0,1}^l`
pub fn h3(input: &Encoder) -> Digest {
    HashFn::H3.digest(input.as_slice())
}

/// `H4: {0,1}* → {0,1}^l`
pub fn h4(input: &Encoder) -> Digest {
    HashFn::H4.digest(input.as_slice())
}

/// `H5: {0,1}* → Z_q*`
pub fn h5(input: &Encoder) -> Scalar {
    HashFn::H5.scalar(input.as_slice())
}

pub fn xor_into(dst: &mut [u8], mask: &[u8]) {
    dst.iter_mut().zip(mask).for_each(|(a, b)| *a ^= b);
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn deterministic() {
        let e = Encoder::new().bytes(b"abc").g1(&PointG1::generator());
        assert_eq!(h0(&e), h0(&e));
        assert_eq!(h2(&e), h2(&e));
        assert_eq!(h1(&PointG1::identity()), h1(&PointG1::identity()));
    }

    #[test]
    fn one_bit_changes_output() {
        let a = Encoder::new().bytes(&[0b0000_0000, 7]);
        let b = Encoder::new().bytes(&[0b0000_0001, 7]);
        assert_ne!(h0(&a), h0(&b));
        assert_ne!(h4(&a), h4(&b));
        assert_ne!(h5(&a), h5(&b));
    }

    #[test]
    fn family_is_domain_separated() {
        let input = Encoder::new().bytes(b"same input").g1(&PointG1::generator());
        let outputs: HashSet<Vec<u8>> = HashFn::ALL
            .iter()
            .map(|h| h.digest(input.as_slice()).0.to_vec())
            .collect();
        assert_eq!(outputs.len(), 6);
        let scalars: HashSet<[u8; 32]> = HashFn::ALL
            .iter()
            .map(|h| h.scalar(input.as_slice()).to_bytes())
            .collect();
        assert_eq!(scalars.len(), 6);
        // masks are separated from the plain digests of the same member
        let m = HashFn::H2.mask(input.as_slice(), 16);
        assert_ne!(m, HashFn::H2.digest(input.as_slice()).0.to_vec());
    }

    #[test]
    fn length_prefix_prevents_boundary_shift() {
        let a = Encoder::new().bytes(b"ab").bytes(b"c");
        let b = Encoder::new().bytes(b"a").bytes(b"bc");
        assert_ne!(h4(&a), h4(&b));
    }

    #[test]
    fn mask_has_requested_length_and_prefix_stability() {
        let m1 = HashFn::H1.mask(b"x", 384);
        let m2 = HashFn::H1.mask(b"x", 40);
        assert_eq!(m1.len(), 384);
        assert_eq!(&m1[..40], &m2[..]);
    }
}
