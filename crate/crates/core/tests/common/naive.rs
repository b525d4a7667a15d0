//! Reference implementations used as oracles. Everything here works on plain
//! `Vec<bool>` or f64 and is written for obviousness, not speed; the tests
//! compare the packed fast paths against these.

#![allow(dead_code)]

use hyperdim::{Dimension, Hypervector, RandomSource};

pub fn to_bits(v: &Hypervector) -> Vec<bool> {
    v.bits()
}

pub fn hv(dim: Dimension, bits: &[bool]) -> Hypervector {
    Hypervector::from_bits(dim, bits).expect("oracle bit length matches dim")
}

pub fn random_bits(d: usize, rng: &mut RandomSource) -> Vec<bool> {
    (0..d).map(|_| rng.next_bit()).collect()
}

pub fn xor(a: &[bool], b: &[bool]) -> Vec<bool> {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x != y).collect()
}

pub fn hamming(a: &[bool], b: &[bool]) -> usize {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).filter(|(x, y)| x != y).count()
}

pub fn similarity(a: &[bool], b: &[bool]) -> f64 {
    1.0 - hamming(a, b) as f64 / a.len() as f64
}

/// Bit i moves to (i + shift) mod d; negative shifts move the other way.
pub fn rotate(v: &[bool], shift: i64) -> Vec<bool> {
    let d = v.len() as i64;
    let mut out = vec![false; v.len()];
    for (i, &bit) in v.iter().enumerate() {
        let j = (i as i64 + shift).rem_euclid(d) as usize;
        out[j] = bit;
    }
    out
}

/// Unweighted majority vote, ties broken by one rng bit per tied coordinate,
/// drawn in ascending coordinate order.
pub fn majority(items: &[&[bool]], ties: &mut RandomSource) -> Vec<bool> {
    let weighted: Vec<(&[bool], u32)> = items.iter().map(|v| (*v, 1)).collect();
    weighted_majority(&weighted, ties)
}

pub fn weighted_majority(items: &[(&[bool], u32)], ties: &mut RandomSource) -> Vec<bool> {
    let d = items[0].0.len();
    let total: u64 = items.iter().map(|(_, w)| *w as u64).sum();
    assert!(total > 0);
    let mut out = vec![false; d];
    for i in 0..d {
        let ones: u64 = items
            .iter()
            .filter(|(v, _)| v[i])
            .map(|(_, w)| *w as u64)
            .sum();
        out[i] = match (2 * ones).cmp(&total) {
            std::cmp::Ordering::Greater => true,
            std::cmp::Ordering::Less => false,
            std::cmp::Ordering::Equal => ties.next_bit(),
        };
    }
    out
}

/// rotate²(a) * rotate(b) * c, the order-tagged trigram form.
pub fn trigram(a: &[bool], b: &[bool], c: &[bool]) -> Vec<bool> {
    xor(&xor(&rotate(a, 2), &rotate(b, 1)), c)
}

/// Signed per-coordinate sums of every trigram in the symbol stream.
/// `letters[code]` is the seed pattern for that symbol code.
pub fn profile_counts(syms: &[u8], letters: &[Vec<bool>]) -> Vec<i64> {
    let d = letters[0].len();
    let mut counts = vec![0i64; d];
    for w in syms.windows(3) {
        let t = trigram(
            &letters[w[0] as usize],
            &letters[w[1] as usize],
            &letters[w[2] as usize],
        );
        for (c, &bit) in counts.iter_mut().zip(&t) {
            *c += if bit { 1 } else { -1 };
        }
    }
    counts
}

pub fn cosine_counts(a: &[i64], b: &[i64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let dot: f64 = a.iter().zip(b).map(|(x, y)| (*x as f64) * (*y as f64)).sum();
    let na: f64 = a.iter().map(|x| (*x as f64).powi(2)).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| (*x as f64).powi(2)).sum::<f64>().sqrt();
    dot / (na * nb)
}

/// P(Bin(d, 1/2) <= r) in plain f64. Terms are built incrementally from
/// C(d, k+1) = C(d, k) * (d-k) / (k+1); safe to d = 1000, where C(d, d/2)
/// is still far below the f64 ceiling.
pub fn binomial_cdf(d: usize, r: usize) -> f64 {
    assert!(d <= 1000, "f64 oracle only trusted to d=1000");
    let mut term = 1.0f64;
    let mut sum = 0.0f64;
    for k in 0..=r.min(d) {
        sum += term;
        term = term * (d - k) as f64 / (k + 1) as f64;
    }
    sum / 2.0f64.powi(d as i32)
}

/// Smallest radius whose activation probability reaches `target_p`.
pub fn choose_radius(d: usize, target_p: f64) -> u32 {
    (0..=d)
        .find(|&r| binomial_cdf(d, r) >= target_p)
        .expect("cdf reaches 1 at r = d") as u32
}
