//! Smallest concave increasing `H` with `H̄ ≥ F` on a grid.
//!
//! At knot `xᵢ` with chord slope `sᵢ = (hᵢ₊₁ − hᵢ)/Δᵢ` the domination constraint
//! `hᵢ + sᵢ(X − xᵢ) ≥ F(xᵢ, X)` for `X ∈ [0, xᵢ]` is equivalent to
//!
//! ```text
//! hᵢ ≥ [F(xᵢ, X)·Δᵢ + hᵢ₊₁·(xᵢ − X)] / (xᵢ₊₁ − X)
//! ```
//!
//! which is increasing in `hᵢ₊₁`. Starting below the solution, backward sweeps of this bound
//! alternated with concave envelopes increase monotonically to the smallest feasible `H`.

use super::payoff::{GeneralPayoff, SimplePayoff};
use super::simple::{check_price, simple_value};
use super::{Diagnostics, Hedge, PriceResult};
use crate::adjuster::envelope::concave_envelope_with_slope;
use crate::adjuster::PiecewiseLinear;
use crate::error::{Error, Result};
use crate::quadrature::{integrate_inverse_square, Integral, QuadOptions};
use rayon::prelude::*;

#[derive(Debug, Clone, PartialEq)]
pub struct GridConfig {
    /// Knots of the coarse grid; the fine grid has `2n − 1`.
    pub n: usize,
    /// The grid spans `[X₀, X₀·10^decades]`.
    pub decades: f64,
    /// Relative tolerance on `|L(2n) − L(n)|`.
    pub tol: f64,
    pub max_iterations: usize,
    pub fixed_point_tol: f64,
    /// Coarse scan size for the numerical sup over `X` of custom payoffs.
    pub scan_points: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig { n: 4096, decades: 6.0, tol: 1e-2, max_iterations: 200, fixed_point_tol: 1e-10, scan_points: 64 }
    }
}

/// Where the payoff is read when constraining knot `i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    /// `F(xᵢ, ·)`: constraints only at the knots. Underestimates `H` between knots.
    Knot,
    /// `F(xᵢ₊₁, ·)`: covers every `X* ∈ [xᵢ, xᵢ₊₁)` when `F` is nondecreasing in `X*`, so the
    /// result is a genuine superhedge.
    Segment,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Majorant {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub terminal_slope: f64,
    pub iterations: usize,
    pub change: f64,
}

impl Majorant {
    pub fn function(&self) -> PiecewiseLinear<f64> {
        let n = self.grid.len();
        let mut slopes: Vec<f64> = (0..n - 1)
            .map(|i| (self.values[i + 1] - self.values[i]) / (self.grid[i + 1] - self.grid[i]))
            .collect();
        slopes.push(self.terminal_slope);
        PiecewiseLinear::from_raw(self.grid.clone(), self.values.clone(), slopes)
    }
}

/// Linear extension beyond the last knot: `H(x_n) ≥ value`, slope `slope` afterwards.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Tail {
    pub value: f64,
    pub slope: f64,
}

/// Log-spaced grid on `[x0, x0·10^decades]` with the breakpoints inside merged in.
pub fn log_grid(x0: f64, n: usize, decades: f64, breakpoints: &[f64]) -> Vec<f64> {
    let n = n.max(2);
    let end = x0 * 10f64.powf(decades);
    let mut g: Vec<f64> = (0..n)
        .map(|k| if k + 1 == n { end } else { x0 * 10f64.powf(decades * k as f64 / (n - 1) as f64) })
        .collect();
    g.extend(breakpoints.iter().copied().filter(|&b| b > x0 && b < end));
    g.sort_by(f64::total_cmp);
    g.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs());
    g
}

fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > 1e-10 * b.abs().max(1.0) {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = f(d);
        }
    }
    if fc >= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// `sup_{X ∈ [0, hi]} objective(X)`, exact over a candidate set when the payoff allows it.
fn sup_over_x(payoff: &GeneralPayoff, x_star: f64, hi: f64, scan: usize, objective: impl Fn(f64) -> f64) -> f64 {
    match payoff {
        // F is monotone or linear in X and the objective is a ratio of affine functions.
        GeneralPayoff::SimpleLift(_) | GeneralPayoff::FloatingStrikePut(_) | GeneralPayoff::CashPlusLift { .. } => {
            objective(0.0).max(objective(hi))
        }
        GeneralPayoff::Tabulated { fractions, .. } => fractions
            .iter()
            .map(|f| f * x_star)
            .filter(|&x| x <= hi)
            .chain(std::iter::once(hi))
            .map(&objective)
            .fold(f64::NEG_INFINITY, f64::max),
        GeneralPayoff::Custom(_) => {
            let m = scan.max(2);
            let xs: Vec<f64> = (0..=m).map(|k| hi * k as f64 / m as f64).collect();
            let vals: Vec<f64> = xs.iter().map(|&x| objective(x)).collect();
            let (best, _) = vals
                .iter()
                .enumerate()
                .fold((0, f64::NEG_INFINITY), |acc, (k, &v)| if v > acc.1 { (k, v) } else { acc });
            let lo = xs[best.saturating_sub(1)];
            let up = xs[(best + 1).min(m)];
            let (_, refined) = golden_max(&objective, lo, up);
            refined.max(vals[best])
        }
    }
}

/// `sup_{X ∈ [0, x*]} F(x*, X)`.
fn payoff_sup(payoff: &GeneralPayoff, x_star: f64, scan: usize) -> f64 {
    sup_over_x(payoff, x_star, x_star, scan, |x| payoff.eval(x_star, x))
}

pub(crate) fn tail_closure(payoff: &GeneralPayoff, x_last: f64, scan: usize) -> Result<Option<Tail>> {
    let lift = |g: &SimplePayoff, cash: f64| -> Result<Option<Tail>> {
        let v = simple_value(g, x_last)?;
        if !v.is_finite() {
            return Ok(None);
        }
        Ok(Some(Tail { value: cash * x_last + v, slope: cash + ((v - g.eval(x_last)) / x_last).max(0.0) }))
    };
    match payoff {
        GeneralPayoff::SimpleLift(g) | GeneralPayoff::FloatingStrikePut(g) => lift(g, 0.0),
        GeneralPayoff::CashPlusLift { cash, inner } => lift(inner, *cash),
        GeneralPayoff::Tabulated { values, .. } => {
            let last = values.last().expect("validated");
            Ok(Some(Tail { value: last.iter().copied().fold(0.0, f64::max), slope: 0.0 }))
        }
        GeneralPayoff::Custom(_) => {
            // superhedge the running sup over X as if it were a simple payoff
            let a = |u: f64| payoff_sup(payoff, u, scan);
            match integrate_inverse_square(|y| a(x_last * y), 1.0, &QuadOptions::default().with_tolerance(1e-9))? {
                Integral::Infinite => Ok(None),
                Integral::Finite { value: v, .. } => {
                    Ok(Some(Tail { value: v, slope: ((v - a(x_last)) / x_last).max(0.0) }))
                }
            }
        }
    }
}

/// Exact continuation of the hedge past `x_last`, when the tail closure has a closed form.
pub(crate) fn tail_hedge(payoff: &GeneralPayoff, x_last: f64) -> Option<Box<Hedge>> {
    let simple = |g: &SimplePayoff, cash: f64| Some(Box::new(Hedge::Simple { payoff: g.clone(), x0: x_last, cash }));
    match payoff {
        GeneralPayoff::SimpleLift(g) | GeneralPayoff::FloatingStrikePut(g) => simple(g, 0.0),
        GeneralPayoff::CashPlusLift { cash, inner } => simple(inner, *cash),
        GeneralPayoff::Tabulated { .. } | GeneralPayoff::Custom(_) => None,
    }
}

/// Solves for the smallest concave increasing `H` on `grid` dominating the payoff, with the
/// given tail closure. Returns `None` when the tail integral diverges.
pub fn solve_majorant(payoff: &GeneralPayoff, grid: &[f64], scheme: Scheme, cfg: &GridConfig) -> Result<Option<Majorant>> {
    payoff.validate()?;
    let n = grid.len();
    if n < 2 || grid.windows(2).any(|w| !(w[1] > w[0])) || !(grid[0] > 0.0) {
        return Err(Error::Domain("majorant grid needs at least two increasing positive knots".into()));
    }
    let Some(tail) = tail_closure(payoff, grid[n - 1], cfg.scan_points)? else {
        return Ok(None);
    };
    Ok(Some(solve_with_tail(payoff, grid, scheme, tail, cfg)?))
}

/// Payoff argument used at knot `i`.
fn read_at(payoff: &GeneralPayoff, grid: &[f64], i: usize, scheme: Scheme) -> f64 {
    match (scheme, payoff) {
        // tabulated payoffs are constant on [x_star[i], x_star[i+1]) already
        (Scheme::Segment, GeneralPayoff::Tabulated { .. }) => grid[i],
        (Scheme::Segment, _) if i + 1 < grid.len() => grid[i + 1],
        _ => grid[i],
    }
}

pub(crate) fn solve_with_tail(
    payoff: &GeneralPayoff,
    grid: &[f64],
    scheme: Scheme,
    tail: Tail,
    cfg: &GridConfig,
) -> Result<Majorant> {
    let n = grid.len();
    let scan = cfg.scan_points;
    let s_t = tail.slope;
    let last = n - 1;

    // lower bound: hᵢ ≥ F(xᵢ, X) for every admissible X
    let mut h: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| {
            let fx = read_at(payoff, grid, i, scheme);
            payoff_sup(payoff, grid[i], scan).max(sup_over_x(payoff, fx, grid[i], scan, |x| payoff.eval(fx, x)))
        })
        .collect();
    let last_bound = sup_over_x(payoff, grid[last], grid[last], scan, |x| payoff.eval(grid[last], x) + s_t * (grid[last] - x));
    h[last] = h[last].max(tail.value).max(last_bound);

    let mut change = f64::INFINITY;
    let mut iterations = 0;
    while iterations < cfg.max_iterations {
        iterations += 1;
        let prev = h.clone();
        for i in (0..last).rev() {
            let (xi, xn, hn) = (grid[i], grid[i + 1], h[i + 1]);
            let dx = xn - xi;
            let fx = read_at(payoff, grid, i, scheme);
            let bound = sup_over_x(payoff, fx, xi, scan, |x| (payoff.eval(fx, x) * dx + hn * (xi - x)) / (xn - x));
            if bound > h[i] {
                h[i] = bound;
            }
        }
        let env = concave_envelope_with_slope(grid, &h, s_t)?;
        h = env.function.values().to_vec();
        change = h
            .iter()
            .zip(&prev)
            .map(|(a, b)| (a - b).abs() / a.abs().max(1.0))
            .fold(0.0, f64::max);
        if change < cfg.fixed_point_tol {
            break;
        }
    }
    if change >= cfg.fixed_point_tol {
        return Err(Error::Accuracy { estimate: h[0], error: change, tol: cfg.fixed_point_tol });
    }
    Ok(Majorant { grid: grid.to_vec(), values: h, terminal_slope: s_t, iterations, change })
}

/// Largest violations of the three majorant conditions (all `≤ 0` for a feasible `H`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MajorantCheck {
    /// `max (F − H̄)` over knots and candidate `X`.
    pub domination: f64,
    /// `max (sᵢ₊₁ − sᵢ)` over consecutive slopes.
    pub concavity: f64,
    /// `max (−sᵢ)`.
    pub monotonicity: f64,
}

impl MajorantCheck {
    pub fn is_feasible(&self, tol: f64) -> bool {
        self.domination <= tol && self.concavity <= tol && self.monotonicity <= tol
    }
}

/// Evaluates the knot-scheme constraints on arbitrary values `h` over `grid`.
pub fn check_majorant(payoff: &GeneralPayoff, grid: &[f64], h: &[f64], terminal_slope: f64, scan: usize) -> MajorantCheck {
    let n = grid.len();
    let slope = |i: usize| if i + 1 < n { (h[i + 1] - h[i]) / (grid[i + 1] - grid[i]) } else { terminal_slope };
    let mut out = MajorantCheck { domination: f64::NEG_INFINITY, concavity: f64::NEG_INFINITY, monotonicity: f64::NEG_INFINITY };
    for i in 0..n {
        let (xi, s) = (grid[i], slope(i));
        let short = sup_over_x(payoff, xi, xi, scan, |x| payoff.eval(xi, x) - (h[i] + s * (x - xi)));
        out.domination = out.domination.max(short);
        out.monotonicity = out.monotonicity.max(-s);
        if i + 1 < n {
            out.concavity = out.concavity.max(slope(i + 1) - s);
        }
    }
    out
}

/// Upper price of a general lookback payoff.
///
/// The value is the Richardson extrapolation `2L(2n) − L(n)` of the knot scheme on nested
/// log grids, accepted when `|L(2n) − L(n)|` is within `cfg.tol` (relative). The hedge is the
/// segment-scheme solution on the fine grid, whose `H(X₀)` is reported as `hedge_value`.
/// Tabulated payoffs are solved once on their own `X*` grid, where both schemes coincide.
pub fn price_general(payoff: &GeneralPayoff, x0: f64, cfg: &GridConfig) -> Result<PriceResult> {
    check_price(x0, "x0")?;
    payoff.validate()?;
    if let GeneralPayoff::Tabulated { x_star, .. } = payoff {
        let mut grid = vec![x0];
        grid.extend(x_star.iter().copied().filter(|&x| x > x0));
        if grid.len() < 2 {
            grid.push(x0 * 2.0);
        }
        let m = solve_majorant(payoff, &grid, Scheme::Knot, cfg)?.expect("tabulated tails are finite");
        let value = m.values[0];
        return Ok(PriceResult {
            value,
            hedge_value: value,
            hedge: Some(Hedge::Table { grid: m.function(), beyond: None }),
            diagnostics: Diagnostics {
                grid_n: grid.len(),
                residual: 0.0,
                tol: cfg.tol,
                iterations: m.iterations,
                fixed_point_change: m.change,
            },
        });
    }

    let bps = payoff.breakpoints();
    let coarse = log_grid(x0, cfg.n, cfg.decades, &bps);
    let fine = log_grid(x0, 2 * cfg.n - 1, cfg.decades, &bps);
    let Some(tail) = tail_closure(payoff, fine[fine.len() - 1], cfg.scan_points)? else {
        return Ok(PriceResult {
            value: f64::INFINITY,
            hedge: None,
            hedge_value: f64::INFINITY,
            diagnostics: Diagnostics { grid_n: cfg.n, residual: 0.0, tol: cfg.tol, iterations: 0, fixed_point_change: 0.0 },
        });
    };
    let (lo_n, (lo_2n, up_2n)) = rayon::join(
        || solve_with_tail(payoff, &coarse, Scheme::Knot, tail, cfg),
        || {
            rayon::join(
                || solve_with_tail(payoff, &fine, Scheme::Knot, tail, cfg),
                || solve_with_tail(payoff, &fine, Scheme::Segment, tail, cfg),
            )
        },
    );
    let (lo_n, lo_2n, up_2n) = (lo_n?, lo_2n?, up_2n?);
    let (a, b) = (lo_n.values[0], lo_2n.values[0]);
    let residual = (b - a).abs();
    let value = 2.0 * b - a;
    if residual > cfg.tol * value.abs().max(1.0) {
        return Err(Error::GridTooCoarse { residual, tol: cfg.tol });
    }
    Ok(PriceResult {
        value,
        hedge_value: up_2n.values[0],
        hedge: Some(Hedge::Table { grid: up_2n.function(), beyond: tail_hedge(payoff, fine[fine.len() - 1]) }),
        diagnostics: Diagnostics {
            grid_n: cfg.n,
            residual,
            tol: cfg.tol,
            iterations: lo_n.iterations.max(lo_2n.iterations).max(up_2n.iterations),
            fixed_point_change: lo_n.change.max(lo_2n.change).max(up_2n.change),
        },
    })
}
