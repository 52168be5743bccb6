use crate::error::{Error, Result};
use std::fmt;
use std::sync::Arc;

/// Increasing nonnegative payoff `G(X*)` of a simple lookback.
#[derive(Debug, Clone, PartialEq)]
pub enum SimplePayoff {
    Constant { k: f64 },
    /// Pays `scale·u` once the maximum reaches `u`.
    ThresholdCall { u: f64, scale: f64 },
    /// `min(x, cap)`.
    Capped { cap: f64 },
    /// `scale·x^β`.
    PowerPayoff { beta: f64, scale: f64 },
    /// `G((x − strike)⁺)`.
    FixedStrike { inner: Box<SimplePayoff>, strike: f64 },
    /// Linear interpolation, constant outside the grid.
    Tabulated { grid: Vec<f64>, values: Vec<f64> },
}

impl SimplePayoff {
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidPayoff(format!("{name} must be positive and finite, got {v}")))
            }
        };
        let nonneg = |name: &str, v: f64| {
            if v >= 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidPayoff(format!("{name} must be nonnegative and finite, got {v}")))
            }
        };
        match self {
            SimplePayoff::Constant { k } => nonneg("k", *k),
            SimplePayoff::ThresholdCall { u, scale } => {
                positive("u", *u)?;
                nonneg("scale", *scale)
            }
            SimplePayoff::Capped { cap } => positive("cap", *cap),
            SimplePayoff::PowerPayoff { beta, scale } => {
                if !(*beta >= 0.0) || beta.is_nan() {
                    return Err(Error::InvalidPayoff(format!("beta must be >= 0 for an increasing payoff, got {beta}")));
                }
                nonneg("scale", *scale)
            }
            SimplePayoff::FixedStrike { inner, strike } => {
                positive("strike", *strike)?;
                inner.validate()
            }
            SimplePayoff::Tabulated { grid, values } => {
                if grid.is_empty() || grid.len() != values.len() {
                    return Err(Error::InvalidPayoff(format!(
                        "tabulated payoff needs matching non-empty grid and values ({} vs {})",
                        grid.len(),
                        values.len()
                    )));
                }
                for (i, w) in grid.windows(2).enumerate() {
                    if !(w[1] > w[0]) {
                        return Err(Error::InvalidPayoff(format!("grid[{}] = {} is not above {}", i + 1, w[1], w[0])));
                    }
                }
                for (i, &v) in values.iter().enumerate() {
                    if !(v >= 0.0 && v.is_finite()) {
                        return Err(Error::InvalidPayoff(format!("values[{i}] = {v} must be nonnegative")));
                    }
                    if i > 0 && v < values[i - 1] {
                        return Err(Error::InvalidPayoff(format!(
                            "values[{i}] = {v} decreases; apply running_sup_envelope first"
                        )));
                    }
                }
                Ok(())
            }
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            SimplePayoff::Constant { k } => *k,
            SimplePayoff::ThresholdCall { u, scale } => {
                if x >= *u {
                    scale * u
                } else {
                    0.0
                }
            }
            SimplePayoff::Capped { cap } => x.min(*cap),
            SimplePayoff::PowerPayoff { beta, scale } => scale * x.powf(*beta),
            SimplePayoff::FixedStrike { inner, strike } => inner.eval((x - strike).max(0.0)),
            SimplePayoff::Tabulated { grid, values } => {
                let k = grid.partition_point(|g| *g <= x);
                if k == 0 {
                    values[0]
                } else if k == grid.len() {
                    values[k - 1]
                } else {
                    let (a, b) = (grid[k - 1], grid[k]);
                    values[k - 1] + (values[k] - values[k - 1]) * (x - a) / (b - a)
                }
            }
        }
    }

    /// Points where the payoff has a kink or jump.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            SimplePayoff::Constant { .. } | SimplePayoff::PowerPayoff { .. } => Vec::new(),
            SimplePayoff::ThresholdCall { u, .. } => vec![*u],
            SimplePayoff::Capped { cap } => vec![*cap],
            SimplePayoff::FixedStrike { inner, strike } => {
                let mut v = vec![*strike];
                v.extend(inner.breakpoints().into_iter().map(|b| b + strike));
                v
            }
            SimplePayoff::Tabulated { grid, .. } => grid.clone(),
        }
    }
}

pub type PayoffFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// Payoff `F(X*, X)` on `X* ≥ X₀, 0 ≤ X ≤ X*`.
#[derive(Clone)]
pub enum GeneralPayoff {
    /// `G(X*)`.
    SimpleLift(SimplePayoff),
    /// `G(X* − X)`.
    FloatingStrikePut(SimplePayoff),
    /// `c·X + G(X*)`.
    CashPlusLift { cash: f64, inner: SimplePayoff },
    /// `values[i][j]` is the payoff at `X* ∈ [x_star[i], x_star[i+1])` and `X = fractions[j]·X*`,
    /// linear in between fractions. Fractions must start at 0 and end at 1.
    Tabulated { x_star: Vec<f64>, fractions: Vec<f64>, values: Vec<Vec<f64>> },
    /// Arbitrary evaluator. The solver searches over `X` numerically and assumes `F` is
    /// nondecreasing in `X*`.
    Custom(PayoffFn),
}

impl fmt::Debug for GeneralPayoff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeneralPayoff::SimpleLift(g) => f.debug_tuple("SimpleLift").field(g).finish(),
            GeneralPayoff::FloatingStrikePut(g) => f.debug_tuple("FloatingStrikePut").field(g).finish(),
            GeneralPayoff::CashPlusLift { cash, inner } => {
                f.debug_struct("CashPlusLift").field("cash", cash).field("inner", inner).finish()
            }
            GeneralPayoff::Tabulated { x_star, fractions, .. } => f
                .debug_struct("Tabulated")
                .field("x_star", &x_star.len())
                .field("fractions", &fractions.len())
                .finish_non_exhaustive(),
            GeneralPayoff::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

impl GeneralPayoff {
    pub fn custom(f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        GeneralPayoff::Custom(Arc::new(f))
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            GeneralPayoff::SimpleLift(g) | GeneralPayoff::FloatingStrikePut(g) => g.validate(),
            GeneralPayoff::CashPlusLift { cash, inner } => {
                if !(*cash >= 0.0 && cash.is_finite()) {
                    return Err(Error::InvalidPayoff(format!("cash must be nonnegative, got {cash}")));
                }
                inner.validate()
            }
            GeneralPayoff::Tabulated { x_star, fractions, values } => {
                if x_star.is_empty() || fractions.len() < 2 {
                    return Err(Error::InvalidPayoff("tabulated payoff needs a grid and at least two fractions".into()));
                }
                if x_star.windows(2).any(|w| !(w[1] > w[0])) || !(x_star[0] > 0.0) {
                    return Err(Error::InvalidPayoff("x_star grid must be positive and strictly increasing".into()));
                }
                if fractions.windows(2).any(|w| !(w[1] > w[0])) || fractions[0] != 0.0 || *fractions.last().unwrap() != 1.0 {
                    return Err(Error::InvalidPayoff("fractions must increase strictly from 0 to 1".into()));
                }
                if values.len() != x_star.len() {
                    return Err(Error::InvalidPayoff(format!("{} rows for {} x_star knots", values.len(), x_star.len())));
                }
                for (i, row) in values.iter().enumerate() {
                    if row.len() != fractions.len() {
                        return Err(Error::InvalidPayoff(format!("row {i} has {} entries, expected {}", row.len(), fractions.len())));
                    }
                    if let Some(v) = row.iter().find(|v| !(**v >= 0.0 && v.is_finite())) {
                        return Err(Error::InvalidPayoff(format!("row {i} has invalid value {v}")));
                    }
                }
                Ok(())
            }
            GeneralPayoff::Custom(_) => Ok(()),
        }
    }

    pub fn eval(&self, x_star: f64, x: f64) -> f64 {
        match self {
            GeneralPayoff::SimpleLift(g) => g.eval(x_star),
            GeneralPayoff::FloatingStrikePut(g) => g.eval((x_star - x).max(0.0)),
            GeneralPayoff::CashPlusLift { cash, inner } => cash * x + inner.eval(x_star),
            GeneralPayoff::Tabulated { x_star: grid, fractions, values } => {
                let i = grid.partition_point(|g| *g <= x_star).saturating_sub(1);
                let f = if x_star > 0.0 { (x / x_star).clamp(0.0, 1.0) } else { 0.0 };
                let row = &values[i];
                let j = fractions.partition_point(|q| *q <= f);
                if j >= fractions.len() {
                    row[row.len() - 1]
                } else {
                    let (a, b) = (fractions[j - 1], fractions[j]);
                    row[j - 1] + (row[j] - row[j - 1]) * (f - a) / (b - a)
                }
            }
            GeneralPayoff::Custom(f) => f(x_star, x),
        }
    }

    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            GeneralPayoff::SimpleLift(g) | GeneralPayoff::FloatingStrikePut(g) => g.breakpoints(),
            GeneralPayoff::CashPlusLift { inner, .. } => inner.breakpoints(),
            GeneralPayoff::Tabulated { x_star, .. } => x_star.clone(),
            GeneralPayoff::Custom(_) => Vec::new(),
        }
    }
}
