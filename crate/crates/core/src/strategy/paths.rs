//! Price paths used to stress strategies: seeded random walks and a fixed adversarial set.

use super::PricePath;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Geometric ramp from `x0` to `top` in `n` steps.
pub fn ramp(x0: f64, top: f64, n: usize) -> PricePath<f64> {
    let ratio = (top / x0).powf(1.0 / n.max(1) as f64);
    let mut prices = vec![x0];
    for i in 1..=n {
        prices.push(if i == n { top } else { x0 * ratio.powi(i as i32) });
    }
    PricePath::new(prices).expect("ramp prices are positive")
}

/// Linear rise to `peak` over `up` steps, then a linear crash to 0 over `down` steps.
pub fn spike_crash(x0: f64, peak: f64, up: usize, down: usize) -> PricePath<f64> {
    let mut prices = vec![x0];
    for i in 1..=up {
        prices.push(x0 + (peak - x0) * i as f64 / up as f64);
    }
    for i in 1..=down {
        prices.push(peak * (1.0 - i as f64 / down as f64));
    }
    PricePath::new(prices).expect("spike prices are nonnegative")
}

/// Oscillation between `low` and rising highs: each tooth climbs `growth` times higher than
/// the last and falls back to `low`.
pub fn sawtooth(x0: f64, low: f64, growth: f64, teeth: usize) -> PricePath<f64> {
    let mut prices = vec![x0];
    let mut high = x0;
    for _ in 0..teeth {
        high *= growth;
        prices.push(high);
        prices.push(low);
    }
    PricePath::new(prices).expect("sawtooth prices are nonnegative")
}

/// Sets new records exactly at each of `levels` (scaled by `x0`), dipping by `dip` in between.
pub fn record_path(x0: f64, levels: &[f64], dip: f64) -> PricePath<f64> {
    let mut prices = vec![x0];
    for &u in levels {
        prices.push(x0 * u);
        prices.push(x0 * u * dip);
    }
    PricePath::new(prices).expect("record prices are nonnegative")
}

/// `len` steps of i.i.d. factors, log-uniform on `[0.5, 2]`.
pub fn random_multiplicative(x0: f64, len: usize, seed: u64) -> PricePath<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut prices = Vec::with_capacity(len + 1);
    let mut x = x0;
    prices.push(x);
    let ln2 = std::f64::consts::LN_2;
    for _ in 0..len {
        x *= rng.random_range(-ln2..=ln2).exp();
        prices.push(x);
    }
    PricePath::new(prices).expect("multiplicative paths stay positive")
}

/// Ramp, spike-crash, sawtooth, a crash to 0 followed by a recovery, and a fine-grained
/// excursion to a very high maximum.
pub fn adversarial_library(x0: f64) -> Vec<(&'static str, PricePath<f64>)> {
    let levels: Vec<f64> = (1..=40).map(|i| 1.25f64.powi(i)).collect();
    vec![
        ("ramp", ramp(x0, 1e6 * x0, 500)),
        ("spike_crash", spike_crash(x0, 10.0 * x0, 1, 1)),
        ("slow_spike_crash", spike_crash(x0, 100.0 * x0, 100, 100)),
        ("sawtooth", sawtooth(x0, 0.0, 1.5, 40)),
        ("sawtooth_half", sawtooth(x0, 0.5 * x0, 2.0, 30)),
        ("zero_and_back", PricePath::new(vec![x0, 0.0, 0.0, 3.0 * x0, 0.0, 50.0 * x0]).unwrap()),
        ("records", record_path(x0, &levels, 0.3)),
        ("single_jump", PricePath::new(vec![x0, 1e9 * x0, 0.0]).unwrap()),
    ]
}
