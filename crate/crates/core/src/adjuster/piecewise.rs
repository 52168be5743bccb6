use crate::error::{Error, Result};
use crate::scalar::Real;

/// Continuous piecewise-linear function on `[x₀, ∞)`.
///
/// `slopes[i]` is the slope on `[xᵢ, xᵢ₊₁)`; the last entry is the terminal slope used
/// beyond the last knot. Right derivatives at knots are therefore read off directly.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseLinear<R> {
    knots: Vec<R>,
    values: Vec<R>,
    slopes: Vec<R>,
}

impl<R: Real> PiecewiseLinear<R> {
    /// Interpolates `(knots, values)` with chord slopes and the given terminal slope.
    pub fn new(knots: Vec<R>, values: Vec<R>, terminal_slope: R) -> Result<Self> {
        check_knots(&knots)?;
        if values.len() != knots.len() {
            return Err(Error::Domain(format!(
                "{} knots but {} values",
                knots.len(),
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) || !terminal_slope.is_finite() {
            return Err(Error::Domain("piecewise-linear values must be finite".into()));
        }
        let n = knots.len();
        let mut slopes = Vec::with_capacity(n);
        for i in 0..n - 1 {
            slopes.push((values[i + 1] - values[i]) / (knots[i + 1] - knots[i]));
        }
        slopes.push(terminal_slope);
        Ok(PiecewiseLinear { knots, values, slopes })
    }

    /// Builds the function from its value at the first knot and its right slopes.
    pub fn from_slopes(knots: Vec<R>, slopes: Vec<R>, first_value: R) -> Result<Self> {
        check_knots(&knots)?;
        if slopes.len() != knots.len() {
            return Err(Error::Domain(format!(
                "{} knots but {} slopes",
                knots.len(),
                slopes.len()
            )));
        }
        let mut values = Vec::with_capacity(knots.len());
        values.push(first_value);
        for i in 1..knots.len() {
            let v = values[i - 1] + slopes[i - 1] * (knots[i] - knots[i - 1]);
            values.push(v);
        }
        Ok(PiecewiseLinear { knots, values, slopes })
    }

    /// Caller guarantees that the three arrays are mutually consistent.
    pub(crate) fn from_raw(knots: Vec<R>, values: Vec<R>, slopes: Vec<R>) -> Self {
        debug_assert!(!knots.is_empty() && knots.len() == values.len() && knots.len() == slopes.len());
        PiecewiseLinear { knots, values, slopes }
    }

    pub fn knots(&self) -> &[R] {
        &self.knots
    }

    pub fn values(&self) -> &[R] {
        &self.values
    }

    /// Right slopes at the knots; the last entry is the terminal slope.
    pub fn slopes(&self) -> &[R] {
        &self.slopes
    }

    pub fn terminal_slope(&self) -> R {
        self.slopes[self.slopes.len() - 1]
    }

    /// Index of the segment containing `x` (clamped to the first segment on the left).
    fn segment(&self, x: R) -> usize {
        self.knots.partition_point(|k| *k <= x).saturating_sub(1)
    }

    pub fn eval(&self, x: R) -> R {
        let i = self.segment(x);
        if x == self.knots[i] {
            return self.values[i];
        }
        self.values[i] + self.slopes[i] * (x - self.knots[i])
    }

    /// The line through the segment containing `at`, evaluated at `x`. Anchored at the segment's
    /// knot so that intercepts far to the right do not cancel.
    pub fn tangent(&self, at: R, x: R) -> R {
        let i = self.segment(at);
        self.values[i] + self.slopes[i] * (x - self.knots[i])
    }

    pub fn right_slope(&self, x: R) -> R {
        self.slopes[self.segment(x)]
    }

    pub fn last_knot(&self) -> R {
        self.knots[self.knots.len() - 1]
    }

    pub fn len(&self) -> usize {
        self.knots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.knots.is_empty()
    }

    /// `c·x + (1 − c)·self`.
    pub fn mix_with_identity(&self, c: R) -> Self {
        let keep = R::one() - c;
        PiecewiseLinear {
            knots: self.knots.clone(),
            values: self.knots.iter().zip(&self.values).map(|(&x, &v)| c * x + keep * v).collect(),
            slopes: self.slopes.iter().map(|&s| c + keep * s).collect(),
        }
    }
}

fn check_knots<R: Real>(knots: &[R]) -> Result<()> {
    if knots.is_empty() {
        return Err(Error::Domain("piecewise-linear function needs at least one knot".into()));
    }
    for w in knots.windows(2) {
        if !(w[1] > w[0]) {
            return Err(Error::Domain(format!("knots must be strictly increasing ({} after {})", w[1], w[0])));
        }
    }
    if knots.iter().any(|k| !k.is_finite()) {
        return Err(Error::Domain("knots must be finite".into()));
    }
    Ok(())
}
