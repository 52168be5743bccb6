use super::ala::Ala;
use super::asla::{ScaledAsla, StepFunction};
use super::measure::{Atom, DiscreteMeasure};
use super::spine::{log_threshold, Spine};
use super::{measure_to_asla, measure_to_spine};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Number of quantile atoms used when a continuous family is discretized.
pub const DEFAULT_QUANTILE_ATOMS: usize = 256;

/// Lookback adjuster, viewable as a measure, spine, scaled ASLA or ALA.
#[derive(Debug, Clone, PartialEq)]
pub enum Adjuster<R> {
    /// `(1 − c)·αy^{1−α}` as an ASLA; spine `(1 − c)X^{1−α} + cX`.
    Power { alpha: R, cash: R },
    Log { alpha: R },
    /// Hold one unit until the price first reaches `u`.
    Threshold { u: R },
    Discrete(DiscreteMeasure<R>),
    CashMix { c: R, inner: Box<Adjuster<R>> },
}

impl<R: Real> Adjuster<R> {
    pub fn power(alpha: R) -> Result<Self> {
        let a = Adjuster::Power { alpha, cash: R::zero() };
        a.validate()?;
        Ok(a)
    }

    pub fn log(alpha: R) -> Result<Self> {
        let a = Adjuster::Log { alpha };
        a.validate()?;
        Ok(a)
    }

    pub fn threshold(u: R) -> Result<Self> {
        let a = Adjuster::Threshold { u };
        a.validate()?;
        Ok(a)
    }

    pub fn cash_mix(c: R, inner: Adjuster<R>) -> Result<Self> {
        let a = Adjuster::CashMix { c, inner: Box::new(inner) };
        a.validate()?;
        Ok(a)
    }

    /// Holds one unit forever: the measure `δ_∞`.
    pub fn all_cash_in_stock() -> Self {
        Adjuster::Discrete(DiscreteMeasure::at_infinity())
    }

    pub fn validate(&self) -> Result<()> {
        let unit = |name: &str, v: R, open: bool| {
            let ok = if open { v > R::zero() && v < R::one() } else { v >= R::zero() && v <= R::one() };
            if ok {
                Ok(())
            } else {
                let range = if open { "(0,1)" } else { "[0,1]" };
                Err(Error::InvalidAdjuster(format!("{name} must lie in {range}, got {v}")))
            }
        };
        match self {
            Adjuster::Power { alpha, cash } => {
                unit("alpha", *alpha, true)?;
                unit("cash", *cash, false)
            }
            Adjuster::Log { alpha } => {
                if *alpha > R::zero() && alpha.is_finite() {
                    Ok(())
                } else {
                    Err(Error::InvalidAdjuster(format!("alpha must be positive, got {alpha}")))
                }
            }
            Adjuster::Threshold { u } => {
                if *u >= R::one() && u.is_finite() {
                    Ok(())
                } else {
                    Err(Error::InvalidAdjuster(format!("u must be finite and >= 1, got {u}")))
                }
            }
            Adjuster::Discrete(_) => Ok(()),
            Adjuster::CashMix { c, inner } => {
                unit("c", *c, false)?;
                inner.validate()
            }
        }
    }

    /// Tail `P((x, ∞])` computed from the measure description.
    pub fn tail(&self, x: R) -> R {
        match self {
            Adjuster::Power { alpha, cash } => {
                *cash + (R::one() - *cash) * ((R::one() - *alpha) * x.powf(-*alpha))
            }
            Adjuster::Log { alpha } => {
                let a = *alpha;
                if x < log_threshold(a) {
                    R::one()
                } else {
                    let l = x.ln();
                    (R::one() + a).powf(a) * (l.powf(-a) - a * l.powf(-a - R::one()))
                }
            }
            Adjuster::Threshold { u } => {
                if x < *u {
                    R::one()
                } else {
                    R::zero()
                }
            }
            Adjuster::Discrete(p) => p.tail(x),
            Adjuster::CashMix { c, inner } => *c + (R::one() - *c) * inner.tail(x),
        }
    }

    pub fn mass_infinity(&self) -> R {
        match self {
            Adjuster::Power { cash, .. } => *cash,
            Adjuster::Log { .. } | Adjuster::Threshold { .. } => R::zero(),
            Adjuster::Discrete(p) => p.mass_infinity(),
            Adjuster::CashMix { c, inner } => *c + (R::one() - *c) * inner.mass_infinity(),
        }
    }

    /// Total fraction held as a cash-like unit of the security.
    pub fn cash_fraction(&self) -> R {
        match self {
            Adjuster::Power { cash, .. } => *cash,
            Adjuster::CashMix { c, inner } => *c + (R::one() - *c) * inner.cash_fraction(),
            _ => R::zero(),
        }
    }

    /// Whether the measure view is exact (no quantile discretization needed).
    pub fn is_discrete(&self) -> bool {
        match self {
            Adjuster::Threshold { .. } | Adjuster::Discrete(_) => true,
            Adjuster::CashMix { inner, .. } => inner.is_discrete(),
            _ => false,
        }
    }

    pub fn spine(&self) -> Spine<R> {
        match self {
            Adjuster::Power { alpha, cash } => {
                let s = Spine::Power { alpha: *alpha };
                if *cash == R::zero() {
                    s
                } else {
                    Spine::CashMix { cash: *cash, inner: Box::new(s) }
                }
            }
            Adjuster::Log { alpha } => Spine::Log { alpha: *alpha },
            Adjuster::Threshold { u } => measure_to_spine(&threshold_measure(*u)),
            Adjuster::Discrete(p) => measure_to_spine(p),
            Adjuster::CashMix { c, inner } => Spine::CashMix { cash: *c, inner: Box::new(inner.spine()) },
        }
    }

    pub fn asla(&self) -> ScaledAsla<R> {
        match self {
            Adjuster::Power { alpha, cash } => ScaledAsla::Power { alpha: *alpha, scale: R::one() - *cash },
            Adjuster::Log { alpha } => ScaledAsla::Log { alpha: *alpha, scale: R::one() },
            Adjuster::Threshold { u } => ScaledAsla::Step(StepFunction::from_raw(vec![*u], vec![*u], vec![*u])),
            Adjuster::Discrete(p) => measure_to_asla(p),
            Adjuster::CashMix { c, inner } => inner.asla().scaled(R::one() - *c),
        }
    }

    pub fn ala(&self) -> Ala<R> {
        if self.is_discrete() {
            Ala::FromMeasure(self.measure(0).expect("discrete adjusters have exact measures"))
        } else {
            Ala::FromSpine(self.spine())
        }
    }

    /// Measure view; continuous families are split into `k` quantile atoms.
    pub fn measure(&self, k: usize) -> Result<DiscreteMeasure<R>> {
        match self {
            Adjuster::Power { alpha, cash } => power_measure(*alpha, k)?.mix_with_cash(*cash),
            Adjuster::Log { alpha } => log_measure(*alpha, k),
            Adjuster::Threshold { u } => Ok(threshold_measure(*u)),
            Adjuster::Discrete(p) => Ok(p.clone()),
            Adjuster::CashMix { c, inner } => inner.measure(k)?.mix_with_cash(*c),
        }
    }

    /// Points where the views change formula.
    pub fn breakpoints(&self) -> Vec<R> {
        self.spine().breakpoints()
    }
}

fn threshold_measure<R: Real>(u: R) -> DiscreteMeasure<R> {
    DiscreteMeasure::from_parts_unchecked(vec![Atom { location: u, mass: R::one() }], R::zero())
}

/// Assembles `exact atom + k equal-mass quantile atoms`; locations that overflow go to ∞.
fn quantile_measure<R: Real>(exact: Atom<R>, continuous_mass: R, locations: Vec<R>) -> DiscreteMeasure<R> {
    let k = locations.len();
    let each = continuous_mass / R::from_usize_lossy(k.max(1));
    let mut atoms = vec![exact];
    let mut at_infinity = R::zero();
    for loc in locations {
        if loc.is_finite() {
            if loc == atoms[atoms.len() - 1].location {
                let last = atoms.len() - 1;
                atoms[last].mass = atoms[last].mass + each;
            } else {
                atoms.push(Atom { location: loc, mass: each });
            }
        } else {
            at_infinity = at_infinity + each;
        }
    }
    DiscreteMeasure::from_parts_unchecked(atoms, at_infinity)
}

fn mid_quantile_levels<R: Real>(k: usize) -> impl Iterator<Item = R> {
    let kk = R::from_usize_lossy(k);
    (0..k).map(move |j| R::one() - (R::from_usize_lossy(j) + R::lit(0.5)) / kk)
}

/// Power family measure: atom `α` at 1 and density `α(1−α)y^{−1−α}`, split into `k` atoms.
pub fn power_measure<R: Real>(alpha: R, k: usize) -> Result<DiscreteMeasure<R>> {
    Adjuster::Power { alpha, cash: R::zero() }.validate()?;
    if k == 0 {
        return Err(Error::Domain("number of quantile atoms must be positive".into()));
    }
    // P((x, ∞)) restricted to the density is (1−α)x^{−α}; the level s·(1−α) sits at s^{−1/α}.
    let locations = mid_quantile_levels::<R>(k).map(|s| s.powf(-R::one() / alpha)).collect();
    Ok(quantile_measure(Atom { location: R::one(), mass: alpha }, R::one() - alpha, locations))
}

/// Log family measure: atom `α/(1+α)` at `e^{1+α}` and the remaining mass split into `k` atoms.
pub fn log_measure<R: Real>(alpha: R, k: usize) -> Result<DiscreteMeasure<R>> {
    Adjuster::Log { alpha }.validate()?;
    if k == 0 {
        return Err(Error::Domain("number of quantile atoms must be positive".into()));
    }
    let one = R::one();
    let c = (one + alpha).powf(alpha);
    let m = one / (one + alpha);
    // continuous tail as a function of t = ln x, decreasing on [1+α, ∞)
    let tail = |t: R| c * (t.powf(-alpha) - alpha * t.powf(-alpha - one));
    let t0 = one + alpha;
    let ln_max = R::max_value().ln();
    let locations = mid_quantile_levels::<R>(k)
        .map(|s| {
            let q = m * s;
            let mut lo = t0;
            let mut hi = t0 + t0;
            while tail(hi) > q {
                lo = hi;
                hi = hi + hi;
                if !hi.is_finite() {
                    return R::infinity();
                }
            }
            for _ in 0..200 {
                let mid = lo + (hi - lo) * R::lit(0.5);
                if mid <= lo || mid >= hi {
                    break;
                }
                if tail(mid) > q {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let t = lo + (hi - lo) * R::lit(0.5);
            if t >= ln_max {
                R::infinity()
            } else {
                t.exp()
            }
        })
        .collect();
    let a = log_threshold(alpha);
    Ok(quantile_measure(Atom { location: a, mass: alpha / (one + alpha) }, m, locations))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_measure_keeps_exact_atom() {
        let p = power_measure(0.5_f64, 256).unwrap();
        assert_eq!(p.atoms()[0], Atom { location: 1.0, mass: 0.5 });
        assert_eq!(p.atoms().len(), 257);
        assert!((p.total_mass() - 1.0).abs() < 1e-12);
        assert_eq!(p.mass_infinity(), 0.0);
        // the median of the continuous part: (1−α)x^{−α} = (1−α)/2 at x = 4
        let median = p.atoms()[128].location;
        assert!(median > 3.9 && median < 4.1, "{median}");
    }

    #[test]
    fn log_measure_keeps_exact_atom() {
        let p = log_measure(1.0_f64, 256).unwrap();
        let a = 2.0_f64.exp();
        assert!((p.atoms()[0].location - a).abs() < 1e-15);
        assert_eq!(p.atoms()[0].mass, 0.5);
        assert!((p.total_mass() - 1.0).abs() < 1e-12);
        // quantile atoms far out overflow f64 and are parked at infinity
        assert!(p.mass_infinity() < 0.01);
    }

    #[test]
    fn tails_match_between_views() {
        let adjusters = vec![
            Adjuster::power(0.5).unwrap(),
            Adjuster::Power { alpha: 0.3, cash: 0.2 },
            Adjuster::log(1.0).unwrap(),
            Adjuster::threshold(2.0).unwrap(),
            Adjuster::all_cash_in_stock(),
            Adjuster::cash_mix(0.3, Adjuster::threshold(3.0).unwrap()).unwrap(),
        ];
        for a in &adjusters {
            let s = a.spine();
            for x in [1.0, 1.5, 2.0, 3.0, 7.389, 10.0, 1e4] {
                assert_eq!(s.right_slope(x), a.tail(x), "{a:?} at {x}");
            }
        }
    }

    #[test]
    fn threshold_positions() {
        let a = Adjuster::threshold(2.0).unwrap();
        assert_eq!(a.tail(1.5), 1.0);
        assert_eq!(a.tail(2.0), 0.0);
        let one = Adjuster::threshold(1.0).unwrap();
        assert_eq!(one.spine().value(50.0), 1.0);
    }

    #[test]
    fn parameter_validation() {
        assert!(Adjuster::power(1.0).is_err());
        assert!(Adjuster::power(0.0).is_err());
        assert!(Adjuster::log(-1.0).is_err());
        assert!(Adjuster::threshold(0.5).is_err());
        assert!(Adjuster::cash_mix(1.5, Adjuster::power(0.5).unwrap()).is_err());
    }
}
