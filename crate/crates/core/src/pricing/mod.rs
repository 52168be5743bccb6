//! Upper prices of adjusted American lookbacks and their superhedges.

pub mod bruteforce;
pub mod majorant;
pub mod payoff;
pub mod simple;

pub use bruteforce::{solve_majorant_bruteforce, LpSolution};
pub use majorant::{check_majorant, log_grid, price_general, solve_majorant, GridConfig, Majorant, MajorantCheck, Scheme};
pub use payoff::{GeneralPayoff, PayoffFn, SimplePayoff};
pub use simple::{price_at_time, price_fixed_strike, price_simple, price_with_cash};

use crate::adjuster::{PiecewiseLinear, Spine};
use crate::error::{Error, Result};
use crate::strategy::{Floors, Strategy};

/// A concave increasing function with a right derivative, defined from some point onward.
pub trait ConcaveIncreasing {
    fn value(&self, x: f64) -> f64;
    fn right_slope(&self, x: f64) -> f64;
    /// Left end of the domain.
    fn start(&self) -> f64;
}

impl ConcaveIncreasing for Spine<f64> {
    fn value(&self, x: f64) -> f64 {
        Spine::value(self, x)
    }
    fn right_slope(&self, x: f64) -> f64 {
        Spine::right_slope(self, x)
    }
    fn start(&self) -> f64 {
        1.0
    }
}

impl ConcaveIncreasing for PiecewiseLinear<f64> {
    fn value(&self, x: f64) -> f64 {
        self.eval(x)
    }
    fn right_slope(&self, x: f64) -> f64 {
        PiecewiseLinear::right_slope(self, x)
    }
    fn start(&self) -> f64 {
        self.knots()[0]
    }
}

/// `H̄(X*, X) = H(X*) + H′(X*)(X − X*)`.
pub fn overline_apply<H: ConcaveIncreasing + ?Sized>(h: &H, x_star: f64, x: f64) -> Result<f64> {
    if !(x_star >= h.start()) || !x_star.is_finite() {
        return Err(Error::Domain(format!("running maximum {x_star} below the start {} of H", h.start())));
    }
    if !(x >= 0.0 && x <= x_star) {
        return Err(Error::Domain(format!("price {x} outside [0, {x_star}]")));
    }
    Ok(h.value(x_star) + h.right_slope(x_star) * (x - x_star))
}

/// The majorant `H` of a price, whose right derivative is the number of units to hold.
#[derive(Debug, Clone, PartialEq)]
pub enum Hedge {
    /// `cash·x + x ∫_x^∞ G(u) u⁻² du` on `[x0, ∞)`.
    Simple { payoff: SimplePayoff, x0: f64, cash: f64 },
    /// Grid solution. Past the last knot it continues as `beyond` when given, and linearly
    /// otherwise; the linear continuation is only a superhedge on the grid range for payoffs
    /// that keep growing in `X*`.
    Table { grid: PiecewiseLinear<f64>, beyond: Option<Box<Hedge>> },
}

impl ConcaveIncreasing for Hedge {
    fn value(&self, x: f64) -> f64 {
        match self {
            Hedge::Simple { payoff, cash, .. } => {
                cash * x + simple::simple_value(payoff, x).unwrap_or(f64::INFINITY)
            }
            Hedge::Table { grid, beyond } => match beyond {
                Some(h) if x > grid.last_knot() => h.value(x),
                _ => grid.eval(x),
            },
        }
    }

    fn right_slope(&self, x: f64) -> f64 {
        match self {
            Hedge::Simple { payoff, cash, .. } => {
                let h = simple::simple_value(payoff, x).unwrap_or(f64::INFINITY);
                cash + ((h - payoff.eval(x)) / x).max(0.0)
            }
            Hedge::Table { grid, beyond } => match beyond {
                Some(h) if x >= grid.last_knot() => h.right_slope(x),
                _ => grid.right_slope(x),
            },
        }
    }

    fn start(&self) -> f64 {
        match self {
            Hedge::Simple { x0, .. } => *x0,
            Hedge::Table { grid, .. } => grid.knots()[0],
        }
    }
}

impl Hedge {
    /// `(x, H(x))` pairs describing the hedge: the grid for tables, a log sample otherwise.
    pub fn knots(&self) -> Vec<(f64, f64)> {
        match self {
            Hedge::Table { grid, .. } => grid.knots().iter().copied().zip(grid.values().iter().copied()).collect(),
            Hedge::Simple { payoff, x0, .. } => {
                let mut xs: Vec<f64> = (0..=24).map(|k| x0 * 10f64.powf(k as f64 / 4.0)).collect();
                xs.extend(payoff.breakpoints().into_iter().filter(|b| b > x0));
                xs.sort_by(f64::total_cmp);
                xs.dedup();
                xs.into_iter().map(|x| (x, self.value(x))).collect()
            }
        }
    }
}

/// Numerical bookkeeping attached to a price.
#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostics {
    /// Knots of the base grid, 0 for closed forms.
    pub grid_n: usize,
    /// `|L(2n) − L(n)|` between the two grid levels.
    pub residual: f64,
    /// Acceptance tolerance on the residual.
    pub tol: f64,
    pub iterations: usize,
    /// Last sup-norm change of the fixed-point iteration.
    pub fixed_point_change: f64,
}

impl Diagnostics {
    pub fn exact() -> Self {
        Diagnostics { grid_n: 0, residual: 0.0, tol: 0.0, iterations: 0, fixed_point_change: 0.0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PriceResult {
    /// Upper price; `+∞` if no superhedge exists.
    pub value: f64,
    pub hedge: Option<Hedge>,
    /// `H(X₀)` of the emitted hedge; the capital to start a replay from.
    pub hedge_value: f64,
    pub diagnostics: Diagnostics,
}

/// Replays a hedge through the strategy engine.
///
/// In normalized units the position is `H′(X*)·X₀/H(X₀)`. The ALA floor reports `H̄(X*, X)` and
/// the strong floor reports the payoff, both divided by the starting capital.
pub struct HedgeStrategy<'a, H: ConcaveIncreasing + ?Sized> {
    hedge: &'a H,
    x0: f64,
    capital: f64,
    payoff: Box<dyn Fn(f64, f64) -> f64 + 'a>,
}

impl<'a, H: ConcaveIncreasing + ?Sized> HedgeStrategy<'a, H> {
    pub fn new(hedge: &'a H, x0: f64, capital: f64, payoff: impl Fn(f64, f64) -> f64 + 'a) -> Self {
        HedgeStrategy { hedge, x0, capital, payoff: Box::new(payoff) }
    }
}

impl<H: ConcaveIncreasing + ?Sized> Strategy<f64> for HedgeStrategy<'_, H> {
    fn position(&self, y_star: f64) -> f64 {
        self.hedge.right_slope(self.x0 * y_star) * self.x0 / self.capital
    }

    fn floors(&self, y_star: f64, y: f64) -> Floors<f64> {
        let (xs, x) = (self.x0 * y_star, self.x0 * y);
        Floors {
            ala: (self.hedge.value(xs) + self.hedge.right_slope(xs) * (x - xs)) / self.capital,
            strong: (self.payoff)(xs, x) / self.capital,
        }
    }
}
