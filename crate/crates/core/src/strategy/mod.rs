//! Self-financing trading strategies driven by the running maximum of the price.
//!
//! The engine trades on the normalized price `Y = X / X₀` with unit initial capital. Reported
//! capital and floors are multiplied by the starting capital `α`.

pub mod paths;

use crate::adjuster::{check_domain, Adjuster, ScaledAsla, Spine};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Capital floors guaranteed at a state `(Y*, Y)`, in normalized units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Floors<R> {
    /// `A(Y*, Y)`.
    pub ala: R,
    /// `F′(Y*) + T(Y*)·Y`.
    pub strong: R,
}

/// A position rule in normalized coordinates.
pub trait Strategy<R: Real> {
    /// Units of `Y` to hold while the running maximum is `y_star`.
    fn position(&self, y_star: R) -> R;
    fn floors(&self, y_star: R, y: R) -> Floors<R>;
}

/// An adjuster prepared for repeated evaluation.
///
/// Positions and the ALA floor come from the spine; the strong floor combines the ASLA view
/// with the measure tail, so the two floors are computed along independent routes.
#[derive(Debug, Clone)]
pub struct AdjusterStrategy<R> {
    adjuster: Adjuster<R>,
    spine: Spine<R>,
    asla: ScaledAsla<R>,
}

impl<R: Real> AdjusterStrategy<R> {
    pub fn new(adjuster: &Adjuster<R>) -> Self {
        AdjusterStrategy { adjuster: adjuster.clone(), spine: adjuster.spine(), asla: adjuster.asla() }
    }

    pub fn adjuster(&self) -> &Adjuster<R> {
        &self.adjuster
    }

    pub fn spine(&self) -> &Spine<R> {
        &self.spine
    }

    pub fn asla(&self) -> &ScaledAsla<R> {
        &self.asla
    }
}

impl<R: Real> Strategy<R> for AdjusterStrategy<R> {
    fn position(&self, y_star: R) -> R {
        self.spine.right_slope(y_star)
    }

    fn floors(&self, y_star: R, y: R) -> Floors<R> {
        let slope = self.spine.right_slope(y_star);
        Floors {
            ala: self.spine.value(y_star) + slope * (y - y_star),
            strong: self.asla.eval(y_star) + self.adjuster.tail(y_star) * y,
        }
    }
}

/// Position `F^=′(x*)` of an adjuster, in normalized coordinates.
pub fn position<R: Real>(adjuster: &Adjuster<R>, x_star: R) -> R {
    adjuster.spine().right_slope(x_star)
}

/// `(A(x*, x), F′(x*) + T(x*)·x)` in normalized coordinates.
pub fn floor<R: Real>(adjuster: &Adjuster<R>, x_star: R, x: R) -> Result<(R, R)> {
    check_domain(x_star, x)?;
    let f = AdjusterStrategy::new(adjuster).floors(x_star, x);
    Ok((f.ala, f.strong))
}

/// Nonnegative price sequence starting at `X₀ > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct PricePath<R> {
    prices: Vec<R>,
}

impl<R: Real> PricePath<R> {
    /// `prices[0]` is `X₀`.
    pub fn new(prices: Vec<R>) -> Result<Self> {
        match prices.first() {
            None => return Err(Error::Domain("price path is empty".into())),
            Some(&x0) if !(x0 > R::zero() && x0.is_finite()) => {
                return Err(Error::Domain(format!("initial price must be positive and finite, got {x0}")))
            }
            _ => {}
        }
        if let Some((t, x)) = prices.iter().enumerate().find(|(_, x)| !(**x >= R::zero() && x.is_finite())) {
            return Err(Error::Domain(format!("price at t={t} must be finite and nonnegative, got {x}")));
        }
        Ok(PricePath { prices })
    }

    pub fn x0(&self) -> R {
        self.prices[0]
    }

    pub fn prices(&self) -> &[R] {
        &self.prices
    }

    pub fn len(&self) -> usize {
        self.prices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prices.is_empty()
    }

    pub fn scaled(&self, lambda: R) -> Result<Self> {
        Self::new(self.prices.iter().map(|&x| x * lambda).collect())
    }
}

/// Engine state after observing a price.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StrategyState<R> {
    pub x0: R,
    /// Last observed price.
    pub price: R,
    pub running_max: R,
    /// Normalized capital, starting at 1.
    pub capital: R,
    /// Units of `Y` held until the next price.
    pub position: R,
}

impl<R: Real> StrategyState<R> {
    pub fn start<S: Strategy<R>>(strategy: &S, x0: R) -> Self {
        StrategyState { x0, price: x0, running_max: x0, capital: R::one(), position: strategy.position(R::one()) }
    }

    pub fn y(&self) -> R {
        self.price / self.x0
    }

    pub fn y_star(&self) -> R {
        self.running_max / self.x0
    }
}

/// One trading round: settle the held position, update the record, rebalance.
pub fn step<R: Real, S: Strategy<R>>(strategy: &S, state: &StrategyState<R>, new_price: R) -> StrategyState<R> {
    let dy = new_price / state.x0 - state.y();
    let capital = state.capital + state.position * dy;
    let running_max = state.running_max.max(new_price);
    StrategyState {
        x0: state.x0,
        price: new_price,
        running_max,
        capital,
        position: strategy.position(running_max / state.x0),
    }
}

/// Audit line for time `t`.
///
/// `position` and `normalized_capital` are in normalized units; the remaining money amounts
/// are multiplied by the starting capital. The position is the one taken after seeing `X_t`,
/// so the capital change at `t + 1` is `position_t · (Y_{t+1} − Y_t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapitalRecord<R> {
    pub t: usize,
    pub price: R,
    pub running_max: R,
    pub position: R,
    pub normalized_capital: R,
    pub capital: R,
    pub ala_floor: R,
    pub strong_floor: R,
}

impl<R: Real> CapitalRecord<R> {
    /// Whether both floors hold up to `rel_tol · max(1, capital)`.
    pub fn guarantee_holds(&self, rel_tol: R) -> bool {
        let slack = rel_tol * R::one().max(self.capital.abs());
        self.capital >= self.ala_floor - slack && self.capital >= self.strong_floor - slack
    }
}

/// Runs a strategy along a path with starting capital `alpha`.
pub fn run_path<R: Real, S: Strategy<R>>(strategy: &S, path: &PricePath<R>, alpha: R) -> Result<Vec<CapitalRecord<R>>> {
    if !(alpha > R::zero() && alpha.is_finite()) {
        return Err(Error::Domain(format!("starting capital must be positive, got {alpha}")));
    }
    let mut state = StrategyState::start(strategy, path.x0());
    let mut out = Vec::with_capacity(path.len());
    out.push(record(strategy, &state, 0, alpha));
    for (t, &x) in path.prices().iter().enumerate().skip(1) {
        state = step(strategy, &state, x);
        out.push(record(strategy, &state, t, alpha));
    }
    Ok(out)
}

fn record<R: Real, S: Strategy<R>>(strategy: &S, s: &StrategyState<R>, t: usize, alpha: R) -> CapitalRecord<R> {
    let floors = strategy.floors(s.y_star(), s.y());
    CapitalRecord {
        t,
        price: s.price,
        running_max: s.running_max,
        position: s.position,
        normalized_capital: s.capital,
        capital: alpha * s.capital,
        ala_floor: alpha * floors.ala,
        strong_floor: alpha * floors.strong,
    }
}

/// Re-derives every capital from its predecessor and checks bitwise equality, plus
/// position bounds and the running maximum.
pub fn audit<R: Real>(records: &[CapitalRecord<R>], x0: R) -> Result<()> {
    let mut running_max = x0;
    for (i, r) in records.iter().enumerate() {
        running_max = running_max.max(r.price);
        if r.running_max != running_max {
            return Err(Error::Contract(format!("t={}: running max {} should be {}", r.t, r.running_max, running_max)));
        }
        if r.position < R::zero() {
            return Err(Error::Contract(format!("t={}: negative position {}", r.t, r.position)));
        }
        if i == 0 {
            if r.normalized_capital != R::one() {
                return Err(Error::Contract(format!("initial capital is {}", r.normalized_capital)));
            }
            continue;
        }
        let prev = &records[i - 1];
        let expected = prev.normalized_capital + prev.position * (r.price / x0 - prev.price / x0);
        if r.normalized_capital != expected {
            return Err(Error::Contract(format!(
                "t={}: capital {} but self-financing gives {}",
                r.t, r.normalized_capital, expected
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adjuster::DiscreteMeasure;

    fn power() -> AdjusterStrategy<f64> {
        AdjusterStrategy::new(&Adjuster::power(0.5).unwrap())
    }

    #[test]
    fn position_examples() {
        assert_eq!(position(&Adjuster::power(0.5).unwrap(), 4.0), 0.25);
        assert_eq!(position(&Adjuster::<f64>::all_cash_in_stock(), 123.0), 1.0);
        let u = Adjuster::threshold(2.0).unwrap();
        assert_eq!(position(&u, 1.5), 1.0);
        assert_eq!(position(&u, 2.0), 0.0);
    }

    #[test]
    fn step_examples() {
        let all_in = AdjusterStrategy::new(&Adjuster::<f64>::all_cash_in_stock());
        let s = step(&all_in, &StrategyState::start(&all_in, 1.0), 3.0);
        assert_eq!(s.capital, 3.0);

        let p = power();
        let s = step(&p, &StrategyState::start(&p, 1.0), 4.0);
        // held (1−α)·1^{−α} = 0.5 units over the jump from 1 to 4
        assert_eq!(s.capital, 2.5);
        assert!(s.capital >= Spine::Power { alpha: 0.5 }.value(4.0));
        assert_eq!(s.position, 0.25);
    }

    #[test]
    fn constant_path_keeps_unit_capital() {
        let path = PricePath::new(vec![1.0; 20]).unwrap();
        let recs = run_path(&power(), &path, 1.0).unwrap();
        assert!(recs.iter().all(|r| r.capital == 1.0));
    }

    #[test]
    fn run_path_scales() {
        let all_in = AdjusterStrategy::new(&Adjuster::<f64>::all_cash_in_stock());
        let path = PricePath::new(vec![100.0, 130.0, 160.0, 200.0]).unwrap();
        let recs = run_path(&all_in, &path, 100.0).unwrap();
        assert_eq!(recs.last().unwrap().capital, 200.0);
        audit(&recs, 100.0).unwrap();
    }

    #[test]
    fn spike_crash_keeps_asla_value() {
        let path = PricePath::new(vec![1.0, 10.0, 0.0]).unwrap();
        let recs = run_path(&power(), &path, 1.0).unwrap();
        let last = recs.last().unwrap();
        let f10 = 0.5 * 10f64.sqrt();
        assert!(last.capital >= f10 - 1e-12, "{} < {f10}", last.capital);
        assert!((last.strong_floor - f10).abs() < 1e-12);
    }

    #[test]
    fn floor_examples() {
        let p = Adjuster::power(0.5).unwrap();
        assert_eq!(floor(&p, 4.0, 4.0).unwrap().0, 2.0);
        let mixed = Adjuster::Power { alpha: 0.5_f64, cash: 0.5 };
        let (ala, strong) = floor(&mixed, 4.0, 2.0).unwrap();
        assert!((ala - 1.75).abs() < 1e-15);
        assert!((strong - 1.75).abs() < 1e-15);
        let d = Adjuster::Discrete(DiscreteMeasure::from_pairs(&[(2.0, 0.5), (4.0, 0.25)], 0.25).unwrap());
        assert_eq!(floor(&d, 1.0, 1.0).unwrap().0, 1.0);
        assert!(floor(&d, 2.0, 3.0).is_err());
    }

    #[test]
    fn audit_detects_leaks() {
        let path = PricePath::new(vec![1.0, 2.0, 1.5]).unwrap();
        let mut recs = run_path(&power(), &path, 1.0).unwrap();
        audit(&recs, 1.0).unwrap();
        recs[2].normalized_capital += 1e-12;
        assert!(audit(&recs, 1.0).is_err());
    }

    #[test]
    fn path_validation() {
        assert!(PricePath::new(vec![0.0, 1.0]).is_err());
        assert!(PricePath::new(vec![1.0, -1.0]).is_err());
        assert!(PricePath::<f64>::new(vec![]).is_err());
        assert!(PricePath::new(vec![1.0, 0.0, 2.0]).is_ok());
    }
}
