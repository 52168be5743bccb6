use super::measure::DiscreteMeasure;
use super::spine::Spine;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Admissible lookback adjuster `A(X*, X)`, affine in `X` for each `X*`.
///
/// Kept in whichever form it was built from so that the measure route and the spine
/// route can be compared against each other.
#[derive(Debug, Clone, PartialEq)]
pub enum Ala<R> {
    /// `S(X*) + S′(X*)(X − X*)`.
    FromSpine(Spine<R>),
    /// `∫_{[1,X*]} u P(du) + X·P((X*, ∞])`.
    FromMeasure(DiscreteMeasure<R>),
}

impl<R: Real> Ala<R> {
    /// Evaluates without domain checks.
    pub fn value(&self, x_star: R, x: R) -> R {
        match self {
            Ala::FromSpine(s) => s.tangent(x_star, x),
            Ala::FromMeasure(p) => p.ala_value(x_star, x),
        }
    }

    /// Evaluates on `X* ≥ 1, 0 ≤ X ≤ X*`.
    pub fn eval(&self, x_star: R, x: R) -> Result<R> {
        check_domain(x_star, x)?;
        Ok(self.value(x_star, x))
    }

    /// Slope in `X` at fixed `X*`.
    pub fn slope(&self, x_star: R) -> R {
        match self {
            Ala::FromSpine(s) => s.right_slope(x_star),
            Ala::FromMeasure(p) => p.tail(x_star),
        }
    }
}

pub(crate) fn check_domain<R: Real>(x_star: R, x: R) -> Result<()> {
    if !(x_star >= R::one()) {
        return Err(Error::Domain(format!("running maximum must be >= 1, got {x_star}")));
    }
    if !(x >= R::zero() && x <= x_star) {
        return Err(Error::Domain(format!("price {x} outside [0, {x_star}]")));
    }
    Ok(())
}
