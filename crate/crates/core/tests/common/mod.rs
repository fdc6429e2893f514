#![allow(dead_code)]

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use robust_kelly::UncertaintySet;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform in `[0, 1)` with 53 random bits.
pub fn unit(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64
}

pub fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * unit(rng)
}

/// A union of one to three disjoint intervals with total length above
/// `min_measure`: `2m` sorted uniform endpoints paired up.
pub fn random_pset(rng: &mut ChaCha8Rng, min_measure: f64) -> UncertaintySet {
    loop {
        let m = 1 + (rng.next_u64() % 3) as usize;
        let mut ends: Vec<f64> = (0..2 * m).map(|_| unit(rng)).collect();
        ends.sort_by(f64::total_cmp);
        let pairs: Vec<(f64, f64)> = ends.chunks(2).map(|c| (c[0], c[1])).collect();
        if let Ok(p) = UncertaintySet::new(&pairs) {
            if p.measure() > min_measure {
                return p;
            }
        }
    }
}

/// `m` disjoint intervals of one common length, placed at random.
pub fn equal_length_pset(rng: &mut ChaCha8Rng, m: usize) -> UncertaintySet {
    loop {
        let len = uniform(rng, 0.01, 0.9 / m as f64);
        let free = 1.0 - len * m as f64;
        let mut cuts: Vec<f64> = (0..m).map(|_| unit(rng) * free).collect();
        cuts.sort_by(f64::total_cmp);
        let pairs: Vec<(f64, f64)> = cuts
            .iter()
            .enumerate()
            .map(|(i, &c)| {
                let lo = c + i as f64 * len;
                (lo, lo + len)
            })
            .collect();
        // Draw again if neighbours touch (and merge) or rounding pushes the
        // last endpoint past 1.
        match UncertaintySet::new(&pairs) {
            Ok(p) if p.intervals().len() == m => return p,
            _ => continue,
        }
    }
}
