mod oracle;

use num_bigint::BigUint;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use twinauth::crypto::{
    aead_decrypt, aead_encrypt, group_order_be, h0, h2, h4, kdf, kdf_anchor, kdf_raw, pairing, AnchorKey,
    DualPublicKey, Encoder, HashFn, PointG1, PointG2, Scalar, SymmetricKey,
};

fn scalar_from(seed: u64) -> Scalar {
    Scalar::random(&mut ChaCha20Rng::seed_from_u64(seed))
}

#[test]
fn group_order_matches_reference() {
    assert_eq!(BigUint::from_bytes_be(&group_order_be()), oracle::order());
}

#[test]
fn scalar_arithmetic_matches_big_integers() {
    let q = oracle::order();
    let mut rng = ChaCha20Rng::seed_from_u64(7);
    for _ in 0..1000 {
        let (a, b) = (Scalar::random(&mut rng), Scalar::random(&mut rng));
        let (x, y) = (oracle::big(&a), oracle::big(&b));
        assert_eq!(oracle::big(&(a + b)), (&x + &y) % &q);
        assert_eq!(oracle::big(&(a * b)), (&x * &y) % &q);
        assert_eq!(oracle::big(&(a - b)), (&x + &q - &y) % &q);
        assert_eq!(oracle::big(&-a), (&q - &x) % &q);
        let inv = a.inverse().unwrap();
        assert_eq!(oracle::big(&inv), x.modpow(&(&q - 2u8), &q));
    }
}

#[test]
fn hashes_match_sha2_reference() {
    let mut rng = ChaCha20Rng::seed_from_u64(8);
    for _ in 0..200 {
        let p = PointG1::generator().mul(&Scalar::random(&mut rng));
        let s = Scalar::random(&mut rng);
        let e = Encoder::new().g1(&p).scalar(&s).timestamp(77);
        let fields: [&[u8]; 3] = [&p.to_bytes(), &s.to_bytes(), &77u32.to_be_bytes()];
        assert_eq!(h0(&e), oracle::h0(&fields));
        assert_eq!(h2(&e), oracle::h2(&fields));
        assert_eq!(h4(&e), oracle::h4(&fields));
    }
}

#[test]
fn hash_members_are_domain_separated() {
    let outputs: Vec<_> = HashFn::ALL.iter().map(|h| h.digest(b"same input")).collect();
    for (i, a) in outputs.iter().enumerate() {
        assert!(outputs[i + 1..].iter().all(|b| a != b));
    }
}

#[test]
fn mask_extends_digest_deterministically() {
    let m = HashFn::H3.mask(b"x", 100);
    assert_eq!(m.len(), 100);
    assert_eq!(m, HashFn::H3.mask(b"x", 100));
    assert_eq!(m[..40], HashFn::H3.mask(b"x", 40)[..]);
    assert_ne!(m, HashFn::H4.mask(b"x", 100));
}

#[test]
fn kdf_matches_hmac_reference() {
    let key = [0x42u8; 32];
    let mut msg = vec![0x69];
    msg.extend_from_slice(b"Enc");
    msg.extend_from_slice(&3u16.to_be_bytes());
    let full = oracle::hmac_sha256(&key, &msg);
    assert_eq!(kdf_raw(&key, &[b"Enc"]), full);
    assert_eq!(kdf(&key, b"Enc").0, full[16..]);
    assert_ne!(kdf(&key, b"Enc"), kdf(&key, b"Int"));

    let anchor = AnchorKey([9; 32]);
    let mut msg = vec![0x69];
    for p in [&b"supi"[..], b"amf-2"] {
        msg.extend_from_slice(p);
        msg.extend_from_slice(&(p.len() as u16).to_be_bytes());
    }
    assert_eq!(kdf_anchor(&anchor, b"supi", b"amf-2").0, oracle::hmac_sha256(&anchor.0, &msg));
}

#[test]
fn aead_rejects_any_modification() {
    let mut rng = ChaCha20Rng::seed_from_u64(9);
    let key = SymmetricKey::random(&mut rng);
    let ct = aead_encrypt(&key, b"context", b"ad", &mut rng);
    assert_eq!(aead_decrypt(&key, &ct, b"ad").unwrap(), b"context");
    assert!(aead_decrypt(&key, &ct, b"other").is_err());
    for i in 0..ct.len() {
        let mut bad = ct.clone();
        bad[i] ^= 1;
        assert!(aead_decrypt(&key, &bad, b"ad").is_err());
    }
    assert!(aead_decrypt(&key, &ct[..10], b"ad").is_err());
    assert!(aead_decrypt(&SymmetricKey::random(&mut rng), &ct, b"ad").is_err());
}

#[test]
fn dual_keys_share_one_secret() {
    let sk = scalar_from(10);
    let k = DualPublicKey::from_secret(&sk);
    assert!(k.is_consistent());
    assert_eq!(pairing(&k.g1, &PointG2::generator()), pairing(&PointG1::generator(), &k.g2));
    let other = DualPublicKey::from_secret(&scalar_from(11));
    assert!(!DualPublicKey { g1: k.g1, g2: other.g2 }.is_consistent());
}

proptest! {
    #[test]
    fn scalar_encoding_round_trips(seed in any::<u64>()) {
        let s = scalar_from(seed);
        prop_assert_eq!(Scalar::from_bytes(&s.to_bytes()).unwrap(), s);
    }

    #[test]
    fn non_canonical_scalars_are_refused(extra in 0u64..1_000_000) {
        let v = (oracle::order() + extra).to_bytes_be();
        prop_assert!(Scalar::from_bytes(&v).is_err());
    }

    #[test]
    fn point_encoding_round_trips(seed in any::<u64>()) {
        let p = PointG1::generator().mul(&scalar_from(seed));
        let b = p.to_bytes();
        prop_assert_eq!(b.len(), 32);
        prop_assert_eq!(PointG1::from_bytes(&b).unwrap(), p);
        let q = PointG2::generator().mul(&scalar_from(seed));
        prop_assert_eq!(PointG2::from_bytes(&q.to_bytes()).unwrap(), q);
    }

    #[test]
    fn scalar_multiplication_is_linear(a in any::<u64>(), b in any::<u64>()) {
        let (x, y) = (scalar_from(a), scalar_from(b));
        let g = PointG1::generator();
        prop_assert_eq!(g.mul(&x) + g.mul(&y), g.mul(&(x + y)));
        prop_assert_eq!(g.mul(&x).mul(&y), g.mul(&oracle::mul_mod(&[x, y])));
    }

    #[test]
    fn pairing_is_bilinear(a in any::<u64>(), b in any::<u64>()) {
        let (x, y) = (scalar_from(a), scalar_from(b));
        let lhs = pairing(&PointG1::generator().mul(&x), &PointG2::generator().mul(&y));
        let rhs = pairing(&PointG1::generator(), &PointG2::generator()).pow(&(x * y));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn aead_round_trips(seed in any::<u64>(), msg in proptest::collection::vec(any::<u8>(), 0..200)) {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let key = SymmetricKey::random(&mut rng);
        let ct = aead_encrypt(&key, &msg, b"", &mut rng);
        prop_assert_eq!(aead_decrypt(&key, &ct, b"").unwrap(), msg);
    }
}
