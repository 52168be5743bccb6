#![allow(dead_code)]

use lookback_core::{DiscreteMeasure, Measure64};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Random discrete measure with up to `max_atoms` atoms in `[1, 1e4]`, sometimes with an atom
/// at 1 and sometimes with mass at infinity.
pub fn random_measure(rng: &mut impl Rng, max_atoms: usize) -> Measure64 {
    let k = rng.random_range(1..=max_atoms);
    let mut pairs: Vec<(f64, f64)> =
        (0..k).map(|_| (10f64.powf(rng.random_range(0.0..4.0)), rng.random_range(0.01..1.0))).collect();
    if rng.random_bool(0.3) {
        pairs.push((1.0, rng.random_range(0.01..1.0)));
    }
    let inf = if rng.random_bool(0.5) { 0.0 } else { rng.random_range(0.0..0.5) };
    let total: f64 = pairs.iter().map(|p| p.1).sum::<f64>() + inf;
    let mut pairs: Vec<(f64, f64)> = pairs.into_iter().map(|(u, m)| (u, m / total)).collect();
    let listed: f64 = pairs.iter().map(|p| p.1).sum();
    // put the rounding remainder on the last atom so the masses add up exactly enough
    let rest = (1.0 - listed - inf / total).max(0.0);
    if let Some(last) = pairs.last_mut() {
        last.1 += rest;
    }
    let listed: f64 = pairs.iter().map(|p| p.1).sum();
    DiscreteMeasure::from_pairs(&pairs, (1.0 - listed).max(0.0)).expect("generated measure is valid")
}

pub fn measure_strategy(max_atoms: usize) -> impl Strategy<Value = Measure64> {
    any::<u64>().prop_map(move |seed| random_measure(&mut ChaCha8Rng::seed_from_u64(seed), max_atoms))
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * 1f64.max(a.abs()).max(b.abs())
}
