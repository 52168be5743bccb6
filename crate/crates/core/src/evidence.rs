//! Calibration of evidence streams: turning a capital process `K_t` into one that keeps at
//! least `c·K_t + F(K*_t)`, so only a bounded share of the evidence already gathered can
//! ever be lost.
//!
//! The capital stream is treated as the price of a security starting at 1 and traded with the
//! adjuster's strategy. Nothing is checked about how the stream was produced; a stream that
//! was not generated by a legitimate betting strategy still calibrates, but the guarantee
//! then says nothing about the forecaster being tested.

use std::cmp::Ordering;
use std::fmt;

use crate::adjuster::{sla_integral, Adjuster, ScaledAsla};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::strategy::{run_path, AdjusterStrategy, PricePath, Strategy};

/// A capital value in `[0, ∞]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Capital<R> {
    Finite(R),
    Infinite,
}

impl<R: Real> Capital<R> {
    /// Maps `+∞` to [`Capital::Infinite`]; rejects NaN and negatives.
    pub fn new(x: R) -> Result<Self> {
        if x.is_nan() || x < R::zero() {
            return Err(Error::Domain(format!("capital must be nonnegative, got {x}")));
        }
        Ok(if x.is_infinite() { Capital::Infinite } else { Capital::Finite(x) })
    }

    pub fn finite(&self) -> Option<R> {
        match self {
            Capital::Finite(x) => Some(*x),
            Capital::Infinite => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Capital::Infinite)
    }

    pub fn to_real(&self) -> R {
        self.finite().unwrap_or_else(R::infinity)
    }
}

impl<R: Real> PartialOrd for Capital<R> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (Capital::Infinite, Capital::Infinite) => Some(Ordering::Equal),
            (Capital::Infinite, _) => Some(Ordering::Greater),
            (_, Capital::Infinite) => Some(Ordering::Less),
            (Capital::Finite(a), Capital::Finite(b)) => a.partial_cmp(b),
        }
    }
}

impl<R: Real> fmt::Display for Capital<R> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Capital::Finite(x) => write!(f, "{x}"),
            Capital::Infinite => f.write_str("inf"),
        }
    }
}

/// Capitals `K_0 = 1, K_1, …` of a betting strategy.
#[derive(Debug, Clone, PartialEq)]
pub struct EvidenceStream<R> {
    values: Vec<Capital<R>>,
}

impl<R: Real> EvidenceStream<R> {
    pub fn new(values: Vec<Capital<R>>) -> Result<Self> {
        match values.first() {
            Some(Capital::Finite(k)) if *k == R::one() => {}
            Some(k) => return Err(Error::Domain(format!("evidence stream must start at 1, got {k}"))),
            None => return Err(Error::Domain("evidence stream is empty".into())),
        }
        if let Some((t, k)) = values.iter().enumerate().find(|(_, k)| matches!(k, Capital::Finite(x) if !(*x >= R::zero()))) {
            return Err(Error::Domain(format!("capital at t={t} is negative: {k}")));
        }
        Ok(EvidenceStream { values })
    }

    pub fn from_reals(values: &[R]) -> Result<Self> {
        Self::new(values.iter().map(|&x| Capital::new(x)).collect::<Result<_>>()?)
    }

    pub fn values(&self) -> &[Capital<R>] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// What happened at the first infinite capital.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InfinityBranch {
    /// The held position was positive, so calibrated capital is infinite from `at` on.
    Explode { at: usize },
    /// The held position was zero; calibrated capital stays frozen from `at` on.
    Freeze { at: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibratedStep<R> {
    pub t: usize,
    pub capital: Capital<R>,
    pub running_max: Capital<R>,
    /// Fraction of the stream held after seeing `K_t`.
    pub position: R,
    pub calibrated: Capital<R>,
    /// `c·K_t + F(K*_t)`, with `F(∞)` the limit of `F`.
    pub floor: Capital<R>,
}

impl<R: Real> CalibratedStep<R> {
    pub fn guarantee_holds(&self, rel_tol: R) -> bool {
        match (self.calibrated, self.floor) {
            (Capital::Infinite, _) => true,
            (Capital::Finite(_), Capital::Infinite) => false,
            (Capital::Finite(k), Capital::Finite(f)) => k >= f - rel_tol * R::one().max(k.abs()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CalibratedStream<R> {
    pub cash: R,
    pub steps: Vec<CalibratedStep<R>>,
    pub infinity: Option<InfinityBranch>,
}

impl<R: Real> CalibratedStream<R> {
    pub fn final_capital(&self) -> Capital<R> {
        self.steps.last().map(|s| s.calibrated).unwrap_or(Capital::Finite(R::one()))
    }
}

fn floor_at<R: Real>(c: R, f: &ScaledAsla<R>, k: Capital<R>, k_star: Capital<R>) -> Capital<R> {
    let fk = match k_star {
        Capital::Finite(y) => f.eval(y),
        Capital::Infinite => f.limit_at_infinity(),
    };
    let ck = match k {
        Capital::Finite(x) => c * x,
        Capital::Infinite if c > R::zero() => R::infinity(),
        Capital::Infinite => R::zero(),
    };
    Capital::new(ck + fk).unwrap_or(Capital::Infinite)
}

/// Calibrates `stream` with the adjuster's strategy. The cash fraction `c` is the adjuster's
/// mass at infinity and `F` its ASLA view; `F/(1−c)` must be an SLA.
pub fn calibrate_stream<R: Real>(adjuster: &Adjuster<R>, stream: &EvidenceStream<R>) -> Result<CalibratedStream<R>> {
    adjuster.validate()?;
    let c = adjuster.mass_infinity();
    let f = adjuster.asla();
    if !(c >= R::zero() && c < R::one()) {
        return Err(Error::InvalidAdjuster(format!("cash fraction must lie in [0, 1), got {c}")));
    }
    let scaled = sla_integral(&f) / (R::one() - c);
    if scaled > R::one() + R::lit(1e-9) {
        return Err(Error::NotAnSla { integral: scaled.as_f64(), bound: 1.0 });
    }
    let strategy = AdjusterStrategy::new(adjuster);
    let values = stream.values();
    let first_inf = values.iter().position(Capital::is_infinite);
    let finite_len = first_inf.unwrap_or(values.len());
    let prices: Vec<R> = values[..finite_len].iter().map(Capital::to_real).collect();
    let records = run_path(&strategy, &PricePath::new(prices)?, R::one())?;
    let mut steps: Vec<CalibratedStep<R>> = records
        .iter()
        .map(|r| {
            let k = Capital::Finite(r.price);
            let k_star = Capital::Finite(r.running_max);
            CalibratedStep {
                t: r.t,
                capital: k,
                running_max: k_star,
                position: r.position,
                calibrated: Capital::Finite(r.capital),
                floor: floor_at(c, &f, k, k_star),
            }
        })
        .collect();
    let infinity = first_inf.map(|s| {
        let last = steps[s - 1];
        let exploded = last.position > R::zero();
        let calibrated = if exploded { Capital::Infinite } else { last.calibrated };
        for (t, &k) in values.iter().enumerate().skip(s) {
            steps.push(CalibratedStep {
                t,
                capital: k,
                running_max: Capital::Infinite,
                position: if exploded { last.position } else { R::zero() },
                calibrated,
                floor: floor_at(c, &f, k, Capital::Infinite),
            });
        }
        if exploded {
            InfinityBranch::Explode { at: s }
        } else {
            InfinityBranch::Freeze { at: s }
        }
    });
    Ok(CalibratedStream { cash: c, steps, infinity })
}

/// The calibrated bet for one round: `x ↦ K′_prev + p·(f(x) − K_prev)`.
///
/// Requires `p ∈ [0, 1]` and `K′_prev ≥ p·K_prev`, which keeps the new bet nonnegative
/// whenever `f` is.
pub fn bet_transform<R: Real, F>(f: F, k_prev: R, k_cal_prev: R, p: R) -> Result<impl Fn(R) -> R>
where
    F: Fn(R) -> R,
{
    if !k_prev.is_finite() || k_prev < R::zero() {
        return Err(Error::Contract(format!("previous capital must be finite and nonnegative, got {k_prev}")));
    }
    if !(p >= R::zero() && p <= R::one()) {
        return Err(Error::Contract(format!("position must lie in [0, 1], got {p}")));
    }
    if k_cal_prev < p * k_prev {
        return Err(Error::Contract(format!(
            "calibrated capital {k_cal_prev} below position times capital {}",
            p * k_prev
        )));
    }
    Ok(move |x| k_cal_prev + p * (f(x) - k_prev))
}

/// Checks that `strategy` applied to a finite stream reproduces the calibrated capitals.
pub fn replay_matches<R: Real, S: Strategy<R>>(strategy: &S, stream: &EvidenceStream<R>, out: &CalibratedStream<R>) -> bool {
    let prices: Vec<R> = stream.values().iter().map(Capital::to_real).collect();
    let Ok(path) = PricePath::new(prices) else { return false };
    let Ok(records) = run_path(strategy, &path, R::one()) else { return false };
    records.len() == out.steps.len()
        && records.iter().zip(&out.steps).all(|(r, s)| s.calibrated == Capital::Finite(r.capital) && s.position == r.position)
}
