//! Scalar field and pairing groups over BN254.
//!
//! The protocol is written for a symmetric pairing; here the two source
//! groups are distinct (Type-3), so any entity whose key appears inside a
//! pairing carries a dual public key `(sk·P1, sk·P2)`.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use ark_bn254::{Bn254, Fr, G1Projective, G2Projective};
use ark_ec::pairing::{Pairing, PairingOutput};
use ark_ec::{AdditiveGroup, PrimeGroup};
use ark_ff::{BigInteger, Field, PrimeField, UniformRand, Zero};
use ark_serialize::{CanonicalDeserialize, CanonicalSerialize};
use rand::{CryptoRng, RngCore};

use super::CryptoError;

/// Width in bytes of a canonical scalar encoding (big-endian).
pub const SCALAR_BYTES: usize = 32;
/// Width in bytes of a compressed first-group point.
pub const G1_BYTES: usize = 32;
/// Width in bytes of a compressed second-group point.
pub const G2_BYTES: usize = 64;
/// Width in bytes of a compressed target-group element.
pub const GT_BYTES: usize = 384;

/// Element of `Z_q`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Scalar(pub(crate) Fr);

impl Scalar {
    pub const ZERO: Scalar = Scalar(Fr::ZERO);
    pub const ONE: Scalar = Scalar(Fr::ONE);

    /// Uniform non-zero scalar.
    pub fn random<R: RngCore + CryptoRng>(rng: &mut R) -> Self {
        loop {
            let s = Fr::rand(rng);
            if !s.is_zero() {
                return Scalar(s);
            }
        }
    }

    pub fn from_u64(v: u64) -> Self {
        Scalar(Fr::from(v))
    }

    pub fn from_u128(v: u128) -> Self {
        Scalar(Fr::from(v))
    }

    /// Interprets arbitrary big-endian bytes as an integer and reduces mod q.
    pub fn from_be_bytes_mod_order(bytes: &[u8]) -> Self {
        Scalar(Fr::from_be_bytes_mod_order(bytes))
    }

    /// Strict decoding: exactly [`SCALAR_BYTES`] big-endian bytes encoding a value `< q`.
    pub fn from_bytes(bytes: &[u8]) -> Result<Self, CryptoError> {
        if bytes.len() != SCALAR_BYTES {
            return Err(CryptoError::Encoding("scalar width"));
        }
        let s = Fr::from_be_bytes_mod_order(bytes);
        if s.into_bigint().to_bytes_be() != bytes {
            return Err(CryptoError::Encoding("scalar not reduced"));
        }
        Ok(Scalar(s))
    }

    pub fn to_bytes(&self) -> [u8; SCALAR_BYTES] {
        let v = self.0.into_bigint().to_bytes_be();
        let mut out = [0u8; SCALAR_BYTES];
        out[SCALAR_BYTES - v.len()..].copy_from_slice(&v);
        out
    }

    /// Low 128 bits of the big-endian encoding.
    pub fn low_128(&self) -> [u8; 16] {
        let b = self.to_bytes();
        let mut out = [0u8; 16];
        out.copy_from_slice(&b[SCALAR_BYTES - 16..]);
        out
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn inverse(&self) -> Option<Self> {
        self.0.inverse().map(Scalar)
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Scalar({})", hex::encode(self.to_bytes()))
    }
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(self, rhs: Scalar) -> Scalar {
        Scalar(self.0 + rhs.0)
    }
}

impl AddAssign for Scalar {
    fn add_assign(&mut self, rhs: Scalar) {
        self.0 += rhs.0;
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    fn sub(self, rhs: Scalar) -> Scalar {
        Scalar(self.0 - rhs.0)
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, rhs: Scalar) -> Scalar {
        Scalar(self.0 * rhs.0)
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar(-self.0)
    }
}

/// The group order `q` as big-endian bytes.
pub fn group_order_be() -> Vec<u8> {
    Fr::MODULUS.to_bytes_be()
}

macro_rules! source_group {
    ($name:ident, $inner:ty, $width:expr, $label:literal) => {
        #[derive(Clone, Copy, PartialEq, Eq)]
        pub struct $name(pub(crate) $inner);

        impl $name {
            pub fn generator() -> Self {
                $name(<$inner>::generator())
            }

            pub fn identity() -> Self {
                $name(<$inner>::zero())
            }

            pub fn is_identity(&self) -> bool {
                self.0.is_zero()
            }

            pub fn mul(&self, k: &Scalar) -> Self {
                $name(self.0 * k.0)
            }

            pub fn to_bytes(&self) -> [u8; $width] {
                let mut out = [0u8; $width];
                self.0
                    .serialize_compressed(&mut out[..])
                    .expect("fixed-width point encoding");
                out
            }

            /// Decodes a compressed point, checking curve and subgroup membership.
            pub fn from_bytes(bytes: &[u8]) -> Result<Self, CryptoError> {
                if bytes.len() != $width {
                    return Err(CryptoError::Encoding(concat!($label, " width")));
                }
                <$inner>::deserialize_compressed(bytes)
                    .map($name)
                    .map_err(|_| CryptoError::Encoding(concat!($label, " not in group")))
            }
        }

        impl Add for $name {
            type Output = $name;
            fn add(self, rhs: $name) -> $name {
                $name(self.0 + rhs.0)
            }
        }

        impl Sub for $name {
            type Output = $name;
            fn sub(self, rhs: $name) -> $name {
                $name(self.0 - rhs.0)
            }
        }

        impl Neg for $name {
            type Output = $name;
            fn neg(self) -> $name {
                $name(-self.0)
            }
        }

        impl fmt::Debug for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, concat!($label, "({})"), hex::encode(self.to_bytes()))
            }
        }
    };
}

source_group!(PointG1, G1Projective, G1_BYTES, "G1");
source_group!(PointG2, G2Projective, G2_BYTES, "G2");

/// Element of the target group, written multiplicatively.
#[derive(Clone, Copy, PartialEq, Eq)]
pub struct GtValue(pub(crate) PairingOutput<Bn254>);

impl GtValue {
    pub fn identity() -> Self {
        GtValue(PairingOutput::zero())
    }

    pub fn pow(&self, k: &Scalar) -> Self {
        GtValue(self.0 * k.0)
    }

    pub fn mul(&self, other: &GtValue) -> Self {
        GtValue(self.0 + other.0)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(GT_BYTES);
        self.0
            .serialize_compressed(&mut out)
            .expect("target group encoding");
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, CryptoError> {
        if bytes.len() != GT_BYTES {
            return Err(CryptoError::Encoding("GT width"));
        }
        PairingOutput::<Bn254>::deserialize_compressed(bytes)
            .map(GtValue)
            .map_err(|_| CryptoError::Encoding("GT not in group"))
    }
}

impl fmt::Debug for GtValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let b = self.to_bytes();
        write!(f, "GT({}..)", hex::encode(&b[..8]))
    }
}

pub fn pairing(a: &PointG1, b: &PointG2) -> GtValue {
    GtValue(Bn254::pairing(a.0, b.0))
}

/// A public key registered in both source groups under one secret.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct DualPublicKey {
    pub g1: PointG1,
    pub g2: PointG2,
}

impl DualPublicKey {
    pub fn from_secret(sk: &Scalar) -> Self {
        DualPublicKey {
            g1: PointG1::generator().mul(sk),
            g2: PointG2::generator().mul(sk),
        }
    }

    /// Both halves carry the same discrete log: `e(g1, P2) == e(P1, g2)`.
    pub fn is_consistent(&self) -> bool {
        pairing(&self.g1, &PointG2::generator()) == pairing(&PointG1::generator(), &self.g2)
    }
}
