//! Reference computations written against the wire-level definitions only:
//! scalar arithmetic in big integers, hashes straight from SHA-2, golden
//! tables parsed from CSV.

#![allow(dead_code)]

use std::collections::BTreeMap;

use num_bigint::BigUint;
use sha2::{Digest as _, Sha256, Sha512};
use twinauth::crypto::{Digest, Scalar};

pub const ORDER_DEC: &str = "21888242871839275222246405745257275088548364400416034343698204186575808495617";

pub fn order() -> BigUint {
    ORDER_DEC.parse().unwrap()
}

pub fn big(s: &Scalar) -> BigUint {
    BigUint::from_bytes_be(&s.to_bytes())
}

pub fn scalar(b: &BigUint) -> Scalar {
    let v = (b % order()).to_bytes_be();
    let mut out = [0u8; 32];
    out[32 - v.len()..].copy_from_slice(&v);
    Scalar::from_bytes(&out).unwrap()
}

pub fn mul_mod(xs: &[Scalar]) -> Scalar {
    let q = order();
    scalar(&xs.iter().fold(BigUint::from(1u8), |acc, x| acc * big(x) % &q))
}

/// Length-prefixed concatenation.
pub fn enc(fields: &[&[u8]]) -> Vec<u8> {
    let mut out = Vec::new();
    for f in fields {
        out.extend_from_slice(&(f.len() as u32).to_be_bytes());
        out.extend_from_slice(f);
    }
    out
}

pub fn digest_hash(tag: u8, fields: &[&[u8]]) -> Digest {
    let h = Sha256::new().chain_update([tag]).chain_update(enc(fields)).finalize();
    Digest(h[..16].try_into().unwrap())
}

pub fn scalar_hash(tag: u8, fields: &[&[u8]]) -> Scalar {
    let h = Sha512::new().chain_update([tag]).chain_update(enc(fields)).finalize();
    let v = BigUint::from_bytes_be(&h) % order();
    if v == BigUint::from(0u8) {
        scalar(&BigUint::from(1u8))
    } else {
        scalar(&v)
    }
}

pub fn h0(fields: &[&[u8]]) -> Scalar {
    scalar_hash(0, fields)
}

pub fn h2(fields: &[&[u8]]) -> Digest {
    digest_hash(2, fields)
}

pub fn h4(fields: &[&[u8]]) -> Digest {
    digest_hash(4, fields)
}

/// `a·n + b` from strings such as `"288n+512"`, `"n"`, `"6400"`, `"0.372n+0.09"`.
pub fn linear(s: &str) -> (f64, f64) {
    let mut out = (0.0, 0.0);
    for term in s.split('+') {
        match term.strip_suffix('n') {
            Some("") => out.0 = 1.0,
            Some(c) => out.0 = c.parse().unwrap(),
            None => out.1 = term.parse().unwrap(),
        }
    }
    out
}

pub fn eval(s: &str, n: f64) -> f64 {
    let (a, b) = linear(s);
    a * n + b
}

/// Rows of a golden CSV keyed by the first column.
pub fn golden(name: &str) -> BTreeMap<String, Vec<String>> {
    let path = format!("{}/tests/data/{name}", env!("CARGO_MANIFEST_DIR"));
    let mut r = csv::Reader::from_path(path).unwrap();
    r.records()
        .map(|rec| {
            let rec = rec.unwrap();
            (rec[0].to_string(), rec.iter().skip(1).map(str::to_string).collect())
        })
        .collect()
}

/// HMAC-SHA-256 from its two-pass definition.
pub fn hmac_sha256(key: &[u8], msg: &[u8]) -> [u8; 32] {
    let mut k = [0u8; 64];
    if key.len() > 64 {
        k[..32].copy_from_slice(&Sha256::digest(key));
    } else {
        k[..key.len()].copy_from_slice(key);
    }
    let pad = |b: u8| k.iter().map(|x| x ^ b).collect::<Vec<u8>>();
    let inner = Sha256::new().chain_update(pad(0x36)).chain_update(msg).finalize();
    Sha256::new().chain_update(pad(0x5c)).chain_update(inner).finalize().into()
}
