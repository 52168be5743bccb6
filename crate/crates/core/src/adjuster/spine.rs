use super::piecewise::PiecewiseLinear;
use crate::scalar::Real;

/// Concave increasing function `F^=` on `[1, ∞)` with `F^=(1) = 1`.
#[derive(Debug, Clone, PartialEq)]
pub enum Spine<R> {
    /// `X^{1−α}`.
    Power { alpha: R },
    /// `X` below `e^{1+α}`, `(1+α)^α X ln^{−α} X` above.
    Log { alpha: R },
    Piecewise(PiecewiseLinear<R>),
    /// `c X + (1 − c) S(X)`.
    CashMix { cash: R, inner: Box<Spine<R>> },
}

/// Threshold `e^{1+α}` where the log family starts to bite.
pub(crate) fn log_threshold<R: Real>(alpha: R) -> R {
    (R::one() + alpha).exp()
}

impl<R: Real> Spine<R> {
    pub fn identity() -> Self {
        Spine::Piecewise(PiecewiseLinear::from_raw(vec![R::one()], vec![R::one()], vec![R::one()]))
    }

    pub fn value(&self, x: R) -> R {
        match self {
            Spine::Power { alpha } => x.powf(R::one() - *alpha),
            Spine::Log { alpha } => {
                if x < log_threshold(*alpha) {
                    x
                } else {
                    (R::one() + *alpha).powf(*alpha) * x * x.ln().powf(-*alpha)
                }
            }
            Spine::Piecewise(f) => f.eval(x),
            Spine::CashMix { cash, inner } => *cash * x + (R::one() - *cash) * inner.value(x),
        }
    }

    /// Right derivative; this is also the tail `P((x, ∞])` of the associated measure.
    pub fn right_slope(&self, x: R) -> R {
        match self {
            Spine::Power { alpha } => (R::one() - *alpha) * x.powf(-*alpha),
            Spine::Log { alpha } => {
                let a = *alpha;
                if x < log_threshold(a) {
                    R::one()
                } else {
                    let l = x.ln();
                    (R::one() + a).powf(a) * (l.powf(-a) - a * l.powf(-a - R::one()))
                }
            }
            Spine::Piecewise(f) => f.right_slope(x),
            Spine::CashMix { cash, inner } => *cash + (R::one() - *cash) * inner.right_slope(x),
        }
    }

    /// `F^=(X) − F^=′(X)·X`, the intercept of the tangent line at `X`.
    pub fn legendre(&self, x: R) -> R {
        self.tangent(x, R::zero())
    }

    /// The right tangent line at `x_star`, evaluated at `x`.
    pub fn tangent(&self, x_star: R, x: R) -> R {
        match self {
            Spine::Piecewise(f) => f.tangent(x_star, x),
            Spine::CashMix { cash, inner } => *cash * x + (R::one() - *cash) * inner.tangent(x_star, x),
            _ => self.value(x_star) + self.right_slope(x_star) * (x - x_star),
        }
    }

    /// Limit of the right derivative at infinity (the mass at infinity).
    pub fn terminal_slope(&self) -> R {
        match self {
            Spine::Power { .. } | Spine::Log { .. } => R::zero(),
            Spine::Piecewise(f) => f.terminal_slope(),
            Spine::CashMix { cash, inner } => *cash + (R::one() - *cash) * inner.terminal_slope(),
        }
    }

    /// Points where the spine is not differentiable or changes formula.
    pub fn breakpoints(&self) -> Vec<R> {
        match self {
            Spine::Power { .. } => Vec::new(),
            Spine::Log { alpha } => vec![log_threshold(*alpha)],
            Spine::Piecewise(f) => f.knots().to_vec(),
            Spine::CashMix { inner, .. } => inner.breakpoints(),
        }
    }
}

/// `x ↦ P((x, ∞])`, evaluated as the right derivative of a spine.
#[derive(Debug, Clone, PartialEq)]
pub struct TailFunction<R> {
    spine: Spine<R>,
}

impl<R: Real> TailFunction<R> {
    pub fn new(spine: Spine<R>) -> Self {
        TailFunction { spine }
    }

    pub fn eval(&self, x: R) -> R {
        self.spine.right_slope(x)
    }

    pub fn mass_infinity(&self) -> R {
        self.spine.terminal_slope()
    }

    pub fn spine(&self) -> &Spine<R> {
        &self.spine
    }
}
