//! Random-walk oracles: the exact law of the maximum of a `±1/N` walk started at 1 and
//! absorbed at 0, expectations under it, and Monte Carlo checks of capital processes.

use crate::adjuster::{log_threshold, Adjuster, ScaledAsla};
use crate::error::{Error, Result};
use crate::quadrature::{integrate_inverse_square, Integral, QuadOptions};
use crate::strategy::{AdjusterStrategy, Strategy};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, One, Zero};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Walk with steps `±1/N` from 1, absorbed at 0; levels tracked up to `M/N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WalkSpec {
    pub n: u64,
    pub m: u64,
}

impl WalkSpec {
    pub fn new(n: u64, m: u64) -> Result<Self> {
        if n == 0 || m < n {
            return Err(Error::Domain(format!("walk needs N >= 1 and M >= N, got N={n}, M={m}")));
        }
        Ok(WalkSpec { n, m })
    }

    /// `M = 10⁴·N`.
    pub fn with_default_cap(n: u64) -> Result<Self> {
        Self::new(n, n.saturating_mul(10_000))
    }

    pub fn cap_level(&self) -> f64 {
        self.m as f64 / self.n as f64
    }
}

/// `P(X* = k/N)` for `k = N..M−1` and `P(X* ≥ M/N)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MaxLaw<T> {
    pub spec: WalkSpec,
    pub masses: Vec<T>,
    pub tail: T,
}

impl<T: Num + Clone> MaxLaw<T> {
    /// `P(X* ≥ k/N)` for `N ≤ k ≤ M`.
    pub fn survival(&self, k: u64) -> T {
        let start = (k.saturating_sub(self.spec.n)) as usize;
        self.masses[start.min(self.masses.len())..].iter().fold(self.tail.clone(), |acc, m| acc + m.clone())
    }

    pub fn total(&self) -> T {
        self.survival(self.spec.n)
    }
}

/// Exact law from the gambler's-ruin identity `P(X* ≥ k/N) = N/k`.
pub fn max_law<T: Num + FromPrimitive + Clone>(spec: WalkSpec) -> MaxLaw<T> {
    let n = T::from_u64(spec.n).expect("N representable");
    let masses = (spec.n..spec.m)
        .map(|k| {
            let k_t = T::from_u64(k).expect("k representable");
            let k1 = T::from_u64(k + 1).expect("k+1 representable");
            n.clone() / (k_t * k1)
        })
        .collect();
    MaxLaw { spec, masses, tail: n / T::from_u64(spec.m).expect("M representable") }
}

/// `N = 1` law obtained by solving the absorbing chain directly: for each level `k`, the
/// probability of reaching `k` before 0 from 1 solves a tridiagonal system.
pub fn max_law_bruteforce(m: u64) -> Result<MaxLaw<BigRational>> {
    if !(1..=32).contains(&m) {
        return Err(Error::Domain(format!("brute-force chain solve supports 1 <= M <= 32, got {m}")));
    }
    let r = |v: i64| BigRational::from_integer(BigInt::from(v));
    let half = BigRational::new(BigInt::from(1), BigInt::from(2));
    let reach = |k: u64| -> BigRational {
        if k <= 1 {
            return BigRational::one();
        }
        // unknowns h(1..k−1): h(i) − ½h(i−1) − ½h(i+1) = 0, h(0) = 0, h(k) = 1
        let size = (k - 1) as usize;
        let mut diag = vec![r(1); size];
        let lower = vec![-half.clone(); size];
        let upper = vec![-half.clone(); size];
        let mut rhs = vec![BigRational::zero(); size];
        rhs[size - 1] = half.clone();
        // Thomas algorithm
        for i in 1..size {
            let w = lower[i].clone() / diag[i - 1].clone();
            diag[i] = diag[i].clone() - w.clone() * upper[i - 1].clone();
            rhs[i] = rhs[i].clone() - w * rhs[i - 1].clone();
        }
        let mut x = vec![BigRational::zero(); size];
        x[size - 1] = rhs[size - 1].clone() / diag[size - 1].clone();
        for i in (0..size - 1).rev() {
            x[i] = (rhs[i].clone() - upper[i].clone() * x[i + 1].clone()) / diag[i].clone();
        }
        x[0].clone()
    };
    let survival: Vec<BigRational> = (1..=m).map(reach).collect();
    let masses = (0..(m - 1) as usize).map(|i| survival[i].clone() - survival[i + 1].clone()).collect();
    Ok(MaxLaw { spec: WalkSpec { n: 1, m }, masses, tail: survival[(m - 1) as usize].clone() })
}

/// How to bound `∫_a^∞ F(y) y⁻² dy` beyond the lattice cap.
pub enum TailModel<'a> {
    /// `a ↦ ∫_a^∞ F(y) y⁻² dy` in closed form.
    Closed(Box<dyn Fn(f64) -> f64 + Send + Sync + 'a>),
    /// Adaptive quadrature with the usual divergence test.
    Quadrature,
    /// No bound: the interval is `[F(M/N)·N/M, ∞)`.
    Unavailable,
}

impl ScaledAsla<f64> {
    /// `∫_a^∞ F(y) y⁻² dy` for `a ≥ 1`.
    pub fn tail_integral(&self, a: f64) -> f64 {
        match self {
            ScaledAsla::Step(s) => {
                let beyond: f64 = s
                    .locations()
                    .iter()
                    .zip(s.jumps())
                    .filter(|(u, _)| **u > a)
                    .map(|(u, j)| j / u)
                    .sum();
                self.eval(a) / a + beyond
            }
            ScaledAsla::Power { alpha, scale } => scale * a.powf(-alpha),
            ScaledAsla::Log { alpha, scale } => {
                let t = log_threshold(*alpha);
                if a < t {
                    *scale
                } else {
                    scale * (1.0 + alpha).powf(*alpha) * a.ln().powf(-alpha)
                }
            }
        }
    }
}

/// Interval `[lo, hi]` for `E F(X*)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn mid(&self) -> f64 {
        if self.hi.is_finite() {
            0.5 * (self.lo + self.hi)
        } else {
            f64::INFINITY
        }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

/// `Σ_k F(k/N)·P(X* = k/N)` plus a bracket for the mass above the cap, valid for increasing `F`.
///
/// Above the cap, each lattice cell `[k/N, (k+1)/N)` carries mass `∫ y⁻² dy` and `F` is
/// sandwiched between `F(λy)` and `F(y)` with `λ = 1 − 1/M`, so the tail lies in
/// `[λ∫_{λM/N}^∞ F z⁻² dz, ∫_{M/N}^∞ F y⁻² dy]`.
pub fn expected_payoff<F: Fn(f64) -> f64 + Sync>(f: F, spec: WalkSpec, tail: &TailModel<'_>) -> Result<Interval> {
    let nf = spec.n as f64;
    // Neumaier summation keeps ten million terms accurate to ~1e-16
    let mut sum = 0.0;
    let mut comp = 0.0;
    for k in spec.n..spec.m {
        let kf = k as f64;
        let term = f(kf / nf) * (nf / kf / (kf + 1.0));
        let t = sum + term;
        if sum.abs() >= term.abs() {
            comp += (sum - t) + term;
        } else {
            comp += (term - t) + sum;
        }
        sum = t;
    }
    let lattice = sum + comp;
    let cap = spec.cap_level();
    let lambda = 1.0 - 1.0 / spec.m as f64;
    let from = |a: f64| -> Result<f64> {
        match tail {
            TailModel::Closed(g) => Ok(g(a)),
            TailModel::Quadrature => {
                let opts = QuadOptions::default().with_tolerance(1e-12);
                match integrate_inverse_square(|t| f(a * t), 1.0, &opts)? {
                    Integral::Finite { value, error } => Ok((value + error) / a),
                    Integral::Infinite => Ok(f64::INFINITY),
                }
            }
            TailModel::Unavailable => Ok(f64::NAN),
        }
    };
    let (lo_tail, hi_tail) = match tail {
        TailModel::Unavailable => (f(cap) * nf / spec.m as f64, f64::INFINITY),
        _ => {
            let hi = from(cap)?;
            let lo = if spec.m > 1 { lambda * from(lambda * cap)? } else { f(cap) * nf / spec.m as f64 };
            let lo = if lo.is_finite() { lo } else { f(cap) * nf / spec.m as f64 };
            (lo.max(f(cap) * nf / spec.m as f64), hi)
        }
    };
    Ok(Interval { lo: lattice + lo_tail, hi: lattice + hi_tail })
}

/// [`expected_payoff`] for an ASLA view, using its closed-form tail.
pub fn expected_asla(f: &ScaledAsla<f64>, spec: WalkSpec) -> Result<Interval> {
    let g = f.clone();
    expected_payoff(|y| f.eval(y), spec, &TailModel::Closed(Box::new(move |a| g.tail_integral(a))))
}

/// JSON-facing summary of an expectation check.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub family: String,
    pub n: u64,
    pub m: u64,
    pub expectation_lo: f64,
    pub expectation_hi: f64,
    pub target: f64,
    pub pass: bool,
}

/// Checks `E F(X*)` against `∫₁^∞ F y⁻² dy` within `10/N`.
pub fn oracle_report(family: &str, adjuster: &Adjuster<f64>, spec: WalkSpec) -> Result<OracleReport> {
    let asla = adjuster.asla();
    let iv = expected_asla(&asla, spec)?;
    let target = crate::adjuster::sla_integral(&asla);
    Ok(OracleReport {
        family: family.to_string(),
        n: spec.n,
        m: spec.m,
        expectation_lo: iv.lo,
        expectation_hi: iv.hi,
        target,
        pass: (iv.mid() - target).abs() <= 10.0 / spec.n as f64,
    })
}

/// SplitMix64 finalizer, used to derive independent per-path seeds.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn path_seed(master: u64, index: u64) -> u64 {
    splitmix64(master ^ splitmix64(index))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SupermartingaleReport {
    /// Master seed; path `i` uses [`path_seed`]`(seed, i)` with ChaCha8.
    pub seed: u64,
    pub n_paths: usize,
    pub mean: f64,
    pub std_error: f64,
    /// `mean ≤ 1 + 3·std_error` and no floor violations.
    pub pass: bool,
    /// `(path index, path seed)` of paths where capital fell below a floor.
    pub floor_violations: Vec<(usize, u64)>,
    /// Paths stopped by the step limit rather than by absorption.
    pub truncated: usize,
}

struct PathOutcome {
    capital: f64,
    floor_ok: bool,
    truncated: bool,
}

fn walk_once<S: Strategy<f64>>(strategy: &S, spec: WalkSpec, max_steps: u64, seed: u64) -> PathOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nf = spec.n as f64;
    let (mut level, mut top) = (spec.n, spec.n);
    let mut capital = 1.0;
    let mut position = strategy.position(1.0);
    let mut floor_ok = true;
    let mut bits = 0u64;
    let mut left = 0;
    let mut steps = 0;
    let check = |capital: f64, top: u64, level: u64| {
        let fl = strategy.floors(top as f64 / nf, level as f64 / nf);
        let slack = 1e-9 * capital.abs().max(1.0);
        capital >= fl.ala - slack && capital >= fl.strong - slack
    };
    while level > 0 && level < spec.m && steps < max_steps {
        if left == 0 {
            bits = rng.next_u64();
            left = 64;
        }
        let up = bits & 1 == 1;
        bits >>= 1;
        left -= 1;
        steps += 1;
        if up {
            level += 1;
            capital += position / nf;
        } else {
            level -= 1;
            capital -= position / nf;
        }
        if level > top {
            top = level;
            position = strategy.position(top as f64 / nf);
            floor_ok &= check(capital, top, level);
        }
    }
    floor_ok &= check(capital, top, level);
    PathOutcome { capital, floor_ok, truncated: level > 0 && level < spec.m }
}

/// Runs the adjuster's strategy over simulated walks stopped at 0, at `M/N`, or after
/// `max_steps`, and checks that terminal capital is consistent with a supermartingale.
pub fn supermartingale_check(
    adjuster: &Adjuster<f64>,
    spec: WalkSpec,
    n_paths: usize,
    seed: u64,
    max_steps: u64,
) -> Result<SupermartingaleReport> {
    adjuster.validate()?;
    if n_paths < 2 {
        return Err(Error::Domain("need at least two paths".into()));
    }
    let strategy = AdjusterStrategy::new(adjuster);
    let outcomes: Vec<PathOutcome> = (0..n_paths)
        .into_par_iter()
        .map(|i| walk_once(&strategy, spec, max_steps, path_seed(seed, i as u64)))
        .collect();
    let k = n_paths as f64;
    let mean = outcomes.iter().map(|o| o.capital).sum::<f64>() / k;
    let var = outcomes.iter().map(|o| (o.capital - mean).powi(2)).sum::<f64>() / (k - 1.0);
    let std_error = (var / k).sqrt();
    let floor_violations: Vec<(usize, u64)> = outcomes
        .iter()
        .enumerate()
        .filter(|(_, o)| !o.floor_ok)
        .map(|(i, _)| (i, path_seed(seed, i as u64)))
        .collect();
    let truncated = outcomes.iter().filter(|o| o.truncated).count();
    Ok(SupermartingaleReport {
        seed,
        n_paths,
        mean,
        std_error,
        pass: mean <= 1.0 + 3.0 * std_error + 1e-12 && floor_violations.is_empty(),
        floor_violations,
        truncated,
    })
}
