//! Adversary-side computations for leakage experiments and identifier statistics.

use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::crypto::{h2, Digest, Encoder, Scalar};
use crate::sim::Knowledge;

/// Tries every product of up to `max_factors` known scalars (and their
/// inverses) against every known point as the `K_i` input of
/// `k_gNB* = H2(K_i, GUTI, ID_g2)`. Returns the label of the first hit.
pub fn search_session_key(
    k: &Knowledge,
    guti: &Digest,
    id_g2: &Digest,
    target: &Digest,
    max_factors: usize,
) -> Option<String> {
    let mut factors: Vec<(String, Scalar)> = Vec::new();
    for (label, s) in &k.scalars {
        factors.push((label.clone(), *s));
        if let Some(inv) = s.inverse() {
            factors.push((format!("{label}^-1"), inv));
        }
    }
    let mut products: Vec<(String, Scalar)> = vec![("1".into(), Scalar::ONE)];
    let mut frontier: Vec<(usize, String, Scalar)> = vec![(0, "1".into(), Scalar::ONE)];
    for _ in 0..max_factors {
        let mut next = Vec::new();
        for (start, label, acc) in &frontier {
            for (i, (l, f)) in factors.iter().enumerate().skip(*start) {
                let item = (i + 1, format!("{label}*{l}"), *acc * *f);
                products.push((item.1.clone(), item.2));
                next.push(item);
            }
        }
        frontier = next;
    }
    for (pl, p) in &k.points {
        for (sl, s) in &products {
            let x = p.mul(s);
            if h2(&Encoder::new().g1(&x).digest(guti).digest(id_g2)) == *target {
                return Some(format!("{sl}·{pl}"));
            }
        }
    }
    None
}

/// Per-bit-position chi-square test of uniformity over 128-bit identifiers.
/// Returns `(statistic, p_value)` for 128 degrees of freedom.
pub fn bit_uniformity(ids: &[Digest]) -> (f64, f64) {
    let n = ids.len() as f64;
    let mut ones = [0u64; 128];
    for id in ids {
        for (pos, count) in ones.iter_mut().enumerate() {
            if id.0[pos / 8] >> (7 - pos % 8) & 1 == 1 {
                *count += 1;
            }
        }
    }
    let expected = n / 2.0;
    let stat: f64 = ones
        .iter()
        .map(|c| {
            let d = *c as f64 - expected;
            2.0 * d * d / expected
        })
        .sum();
    let dist = ChiSquared::new(128.0).expect("positive degrees of freedom");
    (stat, 1.0 - dist.cdf(stat))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crypto::PointG1;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn search_finds_key_from_complete_knowledge() {
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let (a, b) = (Scalar::random(&mut rng), Scalar::random(&mut rng));
        let k_point = PointG1::generator().mul(&(a * b));
        let (guti, id) = (Digest([1; 16]), Digest([2; 16]));
        let target = h2(&Encoder::new().g1(&k_point).digest(&guti).digest(&id));
        let mut k = Knowledge::default();
        k.points.push(("P".into(), PointG1::generator()));
        k.scalars.push(("a".into(), a));
        assert_eq!(search_session_key(&k, &guti, &id, &target, 3), None);
        k.scalars.push(("b".into(), b));
        assert!(search_session_key(&k, &guti, &id, &target, 3).is_some());
    }

    #[test]
    fn biased_bits_fail_uniformity() {
        let ids: Vec<Digest> = (0..2000u32).map(|i| Digest([(i % 2) as u8; 16])).collect();
        let (_, p) = bit_uniformity(&ids);
        assert!(p < 0.01);
    }
}
