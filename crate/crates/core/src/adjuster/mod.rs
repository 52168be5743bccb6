//! Lookback adjusters in their four equivalent forms and the maps between them.
//!
//! ```text
//!   measure ──► spine ──► ALA
//!      ▲  \                │
//!      │   └──► ASLA ◄─────┘
//! ```
//!
//! All maps are exact on discrete measures and piecewise-linear spines. The power and log
//! families are kept in closed form and only discretized on request.

mod ala;
mod asla;
pub mod envelope;
mod family;
mod measure;
mod piecewise;
mod spine;
pub mod validate;

pub use ala::Ala;
pub(crate) use ala::check_domain;
pub use asla::{ScaledAsla, StepFunction};
pub use envelope::{concave_increasing_envelope, running_sup_envelope, Envelope};
pub use family::{log_measure, power_measure, Adjuster, DEFAULT_QUANTILE_ATOMS};
pub use measure::{Atom, DiscreteMeasure, MASS_TOLERANCE};
pub use piecewise::PiecewiseLinear;
pub use spine::{Spine, TailFunction};
pub(crate) use spine::log_threshold;
pub use validate::{validate_ala, validate_ala_fn, validate_spine, validate_spine_fn, Condition, ValidationReport, Violation};

use crate::error::{Error, Result};
use crate::quadrature::{integrate_inverse_square, Integral, QuadOptions};
use crate::scalar::Real;

/// Tolerance on `∫F/y²` above 1 before an ASLA is rejected.
pub const SLA_TOLERANCE: f64 = 1e-9;

/// The measure view of a spine: exact atoms when the spine is piecewise linear.
#[derive(Debug, Clone, PartialEq)]
pub enum MeasureView<R> {
    Discrete(DiscreteMeasure<R>),
    Tail(TailFunction<R>),
}

impl<R: Real> MeasureView<R> {
    pub fn tail(&self, x: R) -> R {
        match self {
            MeasureView::Discrete(p) => p.tail(x),
            MeasureView::Tail(t) => t.eval(x),
        }
    }

    pub fn mass_infinity(&self) -> R {
        match self {
            MeasureView::Discrete(p) => p.mass_infinity(),
            MeasureView::Tail(t) => t.mass_infinity(),
        }
    }
}

/// `F(y) = Σ_{uᵢ ≤ y} uᵢ mᵢ`.
pub fn measure_to_asla<R: Real>(p: &DiscreteMeasure<R>) -> ScaledAsla<R> {
    let locations: Vec<R> = p.atoms().iter().map(|a| a.location).collect();
    let jumps = p.atoms().iter().map(|a| a.location * a.mass).collect();
    let levels = locations.iter().map(|&u| p.asla_value(u)).collect();
    ScaledAsla::Step(StepFunction::from_raw(locations, jumps, levels))
}

/// Inverse of [`measure_to_asla`], splitting continuous families into
/// [`DEFAULT_QUANTILE_ATOMS`] atoms.
pub fn asla_to_measure<R: Real>(f: &ScaledAsla<R>) -> Result<DiscreteMeasure<R>> {
    asla_to_measure_with(f, DEFAULT_QUANTILE_ATOMS)
}

pub fn asla_to_measure_with<R: Real>(f: &ScaledAsla<R>, k: usize) -> Result<DiscreteMeasure<R>> {
    let integral = sla_integral(f);
    if integral > R::one() + R::lit(SLA_TOLERANCE) {
        return Err(Error::NotAnSla { integral: integral.as_f64(), bound: 1.0 });
    }
    // absorb rounding above 1 by rescaling
    let shrink = if integral > R::one() { R::one() / integral } else { R::one() };
    match f {
        ScaledAsla::Step(s) => {
            let atoms: Vec<Atom<R>> = s
                .locations()
                .iter()
                .zip(s.jumps())
                .map(|(&u, &j)| Atom { location: u, mass: j / u * shrink })
                .filter(|a| a.mass > R::zero())
                .collect();
            let used = atoms.iter().fold(R::zero(), |acc, a| acc + a.mass);
            let rest = (R::one() - used).max(R::zero());
            Ok(DiscreteMeasure::from_parts_unchecked(atoms, rest))
        }
        ScaledAsla::Power { alpha, scale } => {
            power_measure(*alpha, k)?.mix_with_cash((R::one() - *scale * shrink).max(R::zero()))
        }
        ScaledAsla::Log { alpha, scale } => log_measure(*alpha, k)?.mix_with_cash((R::one() - *scale * shrink).max(R::zero())),
    }
}

/// Piecewise-linear spine with knots at 1 and at the atoms, terminal slope `P({∞})`.
pub fn measure_to_spine<R: Real>(p: &DiscreteMeasure<R>) -> Spine<R> {
    let mut knots = vec![R::one()];
    knots.extend(p.atoms().iter().map(|a| a.location).filter(|&u| u > R::one()));
    let values = knots.iter().map(|&x| p.spine_value(x)).collect();
    let slopes = knots.iter().map(|&x| p.tail(x)).collect();
    Spine::Piecewise(PiecewiseLinear::from_raw(knots, values, slopes))
}

/// Reads the measure off the right derivative of the spine.
///
/// A slope drop at 1 smaller than [`MASS_TOLERANCE`] is treated as rounding and yields no atom.
pub fn spine_to_measure<R: Real>(s: &Spine<R>) -> Result<MeasureView<R>> {
    match s {
        Spine::Piecewise(f) => Ok(MeasureView::Discrete(piecewise_to_measure(f)?)),
        Spine::CashMix { cash, inner } => match spine_to_measure(inner)? {
            MeasureView::Discrete(p) => Ok(MeasureView::Discrete(p.mix_with_cash(*cash)?)),
            MeasureView::Tail(_) => Ok(MeasureView::Tail(TailFunction::new(s.clone()))),
        },
        _ => Ok(MeasureView::Tail(TailFunction::new(s.clone()))),
    }
}

fn piecewise_to_measure<R: Real>(f: &PiecewiseLinear<R>) -> Result<DiscreteMeasure<R>> {
    let knots = f.knots();
    let slopes = f.slopes();
    if knots[0] != R::one() {
        return Err(Error::InvalidMeasure(format!("spine must start at 1, starts at {}", knots[0])));
    }
    if !(slopes[0] <= R::one() + R::lit(MASS_TOLERANCE)) {
        return Err(Error::InvalidMeasure(format!("right slope at 1 is {} > 1", slopes[0])));
    }
    let mut atoms = Vec::new();
    let at_one = R::one() - slopes[0];
    if at_one > R::lit(MASS_TOLERANCE) {
        atoms.push(Atom { location: R::one(), mass: at_one });
    }
    for i in 1..knots.len() {
        let drop = slopes[i - 1] - slopes[i];
        if drop < R::zero() {
            return Err(Error::InvalidMeasure(format!("spine slope increases at {}", knots[i])));
        }
        if drop > R::zero() {
            atoms.push(Atom { location: knots[i], mass: drop });
        }
    }
    let terminal = f.terminal_slope();
    if terminal < R::zero() {
        return Err(Error::InvalidMeasure(format!("terminal slope {terminal} is negative")));
    }
    Ok(DiscreteMeasure::from_parts_unchecked(atoms, terminal))
}

pub fn spine_to_ala<R: Real>(s: &Spine<R>) -> Ala<R> {
    Ala::FromSpine(s.clone())
}

/// Diagonal `X* ↦ A(X*, X*)`.
pub fn ala_to_spine<R: Real>(a: &Ala<R>) -> Spine<R> {
    match a {
        Ala::FromSpine(s) => s.clone(),
        Ala::FromMeasure(p) => measure_to_spine(p),
    }
}

pub fn measure_to_ala<R: Real>(p: &DiscreteMeasure<R>) -> Ala<R> {
    Ala::FromMeasure(p.clone())
}

/// `F′(X*) = A(X*, 0)`.
pub fn ala_to_asla<R: Real>(a: &Ala<R>) -> Result<ScaledAsla<R>> {
    match a {
        Ala::FromSpine(s) => spine_to_asla(s),
        Ala::FromMeasure(p) => Ok(measure_to_asla(p)),
    }
}

/// Legendre transform `S(X) − S′(X)·X` of the spine, in closed form where possible.
pub fn spine_to_asla<R: Real>(s: &Spine<R>) -> Result<ScaledAsla<R>> {
    match s {
        Spine::Power { alpha } => Ok(ScaledAsla::Power { alpha: *alpha, scale: R::one() }),
        Spine::Log { alpha } => Ok(ScaledAsla::Log { alpha: *alpha, scale: R::one() }),
        Spine::Piecewise(f) => Ok(measure_to_asla(&piecewise_to_measure(f)?)),
        Spine::CashMix { cash, inner } => Ok(spine_to_asla(inner)?.scaled(R::one() - *cash)),
    }
}

/// `∫₁^∞ F(y) y⁻² dy` in closed form.
pub fn sla_integral<R: Real>(f: &ScaledAsla<R>) -> R {
    match f {
        ScaledAsla::Step(s) => s
            .locations()
            .iter()
            .zip(s.jumps())
            .fold(R::zero(), |acc, (&u, &j)| acc + j / u),
        ScaledAsla::Power { scale, .. } | ScaledAsla::Log { scale, .. } => *scale,
    }
}

/// `∫₁^∞ F(y) y⁻² dy` for a black-box nonnegative `F`, by quadrature with a tail test.
///
/// Returns [`Integral::Infinite`] when `F(y)/y` stays above `1e-6` for three decades past the
/// adaptive cutoff. Slowly decaying ratios such as the log family's `1/ln^{1+α}y` can trip
/// this rule; use [`sla_integral`] for those.
pub fn sla_integral_fn<R: Real, F: Fn(R) -> R>(f: F, opts: &QuadOptions<R>) -> Result<Integral<R>> {
    integrate_inverse_square(f, R::one(), opts)
}
