use super::payoff::SimplePayoff;
use super::{Diagnostics, Hedge, PriceResult};
use crate::error::{Error, Result};
use crate::quadrature::{integrate_inverse_square, Integral, QuadOptions};

/// `x ∫_x^∞ G(u) u⁻² du`, the cheapest superhedge of `G(X*)` started at price `x`.
pub(crate) fn simple_value(g: &SimplePayoff, x: f64) -> Result<f64> {
    Ok(match g {
        SimplePayoff::Constant { k } => *k,
        SimplePayoff::ThresholdCall { u, scale } => scale * u * x / u.max(x),
        SimplePayoff::Capped { cap } => {
            if *cap >= x {
                x * ((cap / x).ln() + 1.0)
            } else {
                *cap
            }
        }
        SimplePayoff::PowerPayoff { beta, scale } => {
            if *scale == 0.0 {
                0.0
            } else if *beta >= 1.0 {
                f64::INFINITY
            } else {
                scale * x.powf(*beta) / (1.0 - beta)
            }
        }
        SimplePayoff::Tabulated { grid, values } => tabulated_value(grid, values, x),
        SimplePayoff::FixedStrike { .. } => {
            let opts = QuadOptions::default().with_breakpoints(g.breakpoints().into_iter().map(|b| b / x));
            match integrate_inverse_square(|y| g.eval(x * y), 1.0, &opts)? {
                Integral::Finite { value, .. } => value,
                Integral::Infinite => f64::INFINITY,
            }
        }
    })
}

/// Exact integral of a piecewise-linear, eventually constant `G`.
fn tabulated_value(grid: &[f64], values: &[f64], x: f64) -> f64 {
    let n = grid.len();
    let mut total = 0.0;
    let mut from = x;
    let start = grid.partition_point(|g| *g <= x);
    if start == 0 {
        // constant values[0] on [x, grid[0])
        total += values[0] * (1.0 / x - 1.0 / grid[0]);
        from = grid[0];
    }
    for k in start.max(1)..n {
        let (a, b) = (grid[k - 1], grid[k]);
        let s = (values[k] - values[k - 1]) / (b - a);
        let lo = from.max(a);
        // G(u) = (values[k-1] − s·a) + s·u on [a, b)
        let c = values[k - 1] - s * a;
        total += c * (1.0 / lo - 1.0 / b) + s * (b / lo).ln();
        from = b;
    }
    total += values[n - 1] / from.max(grid[n - 1]);
    x * total
}

/// `X₀ ∫_{X₀}^∞ G(x) x⁻² dx`, with the hedge `H(x) = x ∫_x^∞ G(u) u⁻² du`.
pub fn price_simple(g: &SimplePayoff, x0: f64) -> Result<PriceResult> {
    check_price(x0, "x0")?;
    g.validate()?;
    let value = simple_value(g, x0)?;
    let hedge = value.is_finite().then(|| Hedge::Simple { payoff: g.clone(), x0, cash: 0.0 });
    Ok(PriceResult { value, hedge_value: value, hedge, diagnostics: Diagnostics::exact() })
}

/// `X_s ∫_{X_s}^∞ G(max(X*_s, x)) x⁻² dx`: the price in the middle of the game.
pub fn price_at_time(g: &SimplePayoff, x_s: f64, xstar_s: f64) -> Result<PriceResult> {
    check_price(x_s, "x_s")?;
    if !(xstar_s >= x_s) || !xstar_s.is_finite() {
        return Err(Error::Domain(format!("running maximum {xstar_s} below current price {x_s}")));
    }
    g.validate()?;
    let at_max = simple_value(g, xstar_s)?;
    let r = x_s / xstar_s;
    let value = if at_max.is_finite() { g.eval(xstar_s) * (1.0 - r) + r * at_max } else { f64::INFINITY };
    let hedge = value.is_finite().then(|| Hedge::Simple { payoff: g.clone(), x0: xstar_s, cash: 0.0 });
    Ok(PriceResult { value, hedge_value: value, hedge, diagnostics: Diagnostics::exact() })
}

/// Price of the American payoff `c·X_t + G(X*_t)`.
pub fn price_with_cash(c: f64, g: &SimplePayoff, x0: f64) -> Result<PriceResult> {
    if !(c >= 0.0 && c.is_finite()) {
        return Err(Error::Domain(format!("cash multiple must be nonnegative, got {c}")));
    }
    let mut r = price_simple(g, x0)?;
    r.value += c * x0;
    r.hedge_value = r.value;
    if let Some(Hedge::Simple { cash, .. }) = r.hedge.as_mut() {
        *cash = c;
    }
    Ok(r)
}

/// `X₀ ∫_{X₀}^∞ G((x − c)⁺) x⁻² dx`.
pub fn price_fixed_strike(g: &SimplePayoff, strike: f64, x0: f64) -> Result<PriceResult> {
    price_simple(&SimplePayoff::FixedStrike { inner: Box::new(g.clone()), strike }, x0)
}

pub(crate) fn check_price(x: f64, name: &str) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} must be positive and finite, got {x}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    fn value(g: &SimplePayoff, x0: f64) -> f64 {
        price_simple(g, x0).unwrap().value
    }

    #[test]
    fn closed_forms() {
        assert_eq!(value(&SimplePayoff::Constant { k: 1.0 }, 3.0), 1.0);
        for u in [1.0, 2.0, 10.0] {
            assert_eq!(value(&SimplePayoff::ThresholdCall { u, scale: 1.0 }, 1.0), 1.0);
        }
        assert!((value(&SimplePayoff::Capped { cap: E }, 1.0) - 2.0).abs() < 1e-15);
        assert_eq!(value(&SimplePayoff::PowerPayoff { beta: 1.0, scale: 1.0 }, 1.0), f64::INFINITY);
        assert_eq!(value(&SimplePayoff::PowerPayoff { beta: 0.5, scale: 1.0 }, 4.0), 4.0);
    }

    #[test]
    fn tabulated_matches_quadrature() {
        let grid = vec![1.5, 2.0, 5.0, 9.0];
        let values = vec![0.5, 1.0, 1.2, 4.0];
        let g = SimplePayoff::Tabulated { grid: grid.clone(), values: values.clone() };
        for x0 in [1.0, 1.5, 3.0, 20.0] {
            let opts = QuadOptions::default().with_breakpoints(grid.iter().map(|b| b / x0));
            let q = integrate_inverse_square(|y| g.eval(x0 * y), 1.0, &opts).unwrap().value();
            assert!((value(&g, x0) - q).abs() < 1e-9, "{x0}");
        }
    }

    #[test]
    fn fixed_strike_examples() {
        let one = SimplePayoff::Constant { k: 1.0 };
        assert!((price_fixed_strike(&one, 0.7, 1.0).unwrap().value - 1.0).abs() < 1e-10);
        let ident = SimplePayoff::PowerPayoff { beta: 1.0, scale: 1.0 };
        assert_eq!(price_fixed_strike(&ident, 0.5, 1.0).unwrap().value, f64::INFINITY);
        let capped = SimplePayoff::Capped { cap: E };
        let small = price_fixed_strike(&capped, 1e-9, 1.0).unwrap().value;
        assert!((small - 2.0).abs() < 1e-7);
        let at_two = price_fixed_strike(&SimplePayoff::Constant { k: 3.0 }, 0.5, 2.0).unwrap().value;
        assert!((at_two - 3.0).abs() < 1e-10);
        // min((x−1)⁺, 2) from X₀ = 1: ∫₁³ (x−1)/x² + ∫₃^∞ 2/x² = ln 3 − 2/3 + 2/3
        let v = price_fixed_strike(&SimplePayoff::Capped { cap: 2.0 }, 1.0, 1.0).unwrap().value;
        assert!((v - 3f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn mid_game_prices() {
        let g = SimplePayoff::Capped { cap: 3.0 };
        let a = price_at_time(&g, 1.5, 1.5).unwrap().value;
        assert_eq!(a, price_simple(&g, 1.5).unwrap().value);
        assert_eq!(price_at_time(&SimplePayoff::Constant { k: 1.0 }, 0.3, 2.0).unwrap().value, 1.0);
        assert_eq!(price_at_time(&g, 1.0, 4.0).unwrap().value, 3.0);
        assert!(price_at_time(&g, 2.0, 1.0).is_err());
    }

    #[test]
    fn cash_examples() {
        assert_eq!(price_with_cash(1.0, &SimplePayoff::Constant { k: 0.0 }, 5.0).unwrap().value, 5.0);
        assert_eq!(price_with_cash(0.5, &SimplePayoff::Constant { k: 1.0 }, 2.0).unwrap().value, 2.0);
        let g = SimplePayoff::Capped { cap: 4.0 };
        assert_eq!(price_with_cash(0.0, &g, 2.0).unwrap().value, price_simple(&g, 2.0).unwrap().value);
    }
}
