use super::spine::log_threshold;
use crate::scalar::Real;

/// Right-continuous increasing step function, zero before its first jump.
#[derive(Debug, Clone, PartialEq)]
pub struct StepFunction<R> {
    locations: Vec<R>,
    jumps: Vec<R>,
    // value on [locations[i], locations[i+1])
    levels: Vec<R>,
}

impl<R: Real> StepFunction<R> {
    /// Jumps must be nonnegative and locations strictly increasing; zero jumps are dropped.
    pub fn from_jumps(locations: Vec<R>, jumps: Vec<R>) -> crate::error::Result<Self> {
        use crate::error::Error;
        if locations.len() != jumps.len() {
            return Err(Error::InvalidAdjuster("step function: locations and jumps differ in length".into()));
        }
        for (i, (&u, &j)) in locations.iter().zip(&jumps).enumerate() {
            if !(u >= R::one()) || !u.is_finite() {
                return Err(Error::InvalidAdjuster(format!("step {i}: location must be finite and >= 1, got {u}")));
            }
            if !(j >= R::zero()) || !j.is_finite() {
                return Err(Error::InvalidAdjuster(format!("step {i}: jump must be nonnegative, got {j}")));
            }
            if i > 0 && !(u > locations[i - 1]) {
                return Err(Error::InvalidAdjuster(format!("step {i}: locations must be strictly increasing")));
            }
        }
        let (locations, jumps): (Vec<R>, Vec<R>) =
            locations.into_iter().zip(jumps).filter(|(_, j)| *j > R::zero()).unzip();
        let mut levels = Vec::with_capacity(jumps.len());
        let mut acc = R::zero();
        for &j in &jumps {
            acc = acc + j;
            levels.push(acc);
        }
        Ok(StepFunction { locations, jumps, levels })
    }

    pub(crate) fn from_raw(locations: Vec<R>, jumps: Vec<R>, levels: Vec<R>) -> Self {
        debug_assert!(locations.len() == levels.len() && jumps.len() == levels.len());
        StepFunction { locations, jumps, levels }
    }

    pub fn zero() -> Self {
        StepFunction { locations: Vec::new(), jumps: Vec::new(), levels: Vec::new() }
    }

    pub fn eval(&self, y: R) -> R {
        match self.locations.partition_point(|u| *u <= y) {
            0 => R::zero(),
            k => self.levels[k - 1],
        }
    }

    pub fn locations(&self) -> &[R] {
        &self.locations
    }

    pub fn levels(&self) -> &[R] {
        &self.levels
    }

    pub fn jumps(&self) -> &[R] {
        &self.jumps
    }
}

/// Scaled simple lookback adjuster `F′` on `[1, ∞)`.
#[derive(Debug, Clone, PartialEq)]
pub enum ScaledAsla<R> {
    Step(StepFunction<R>),
    /// `scale · α y^{1−α}`.
    Power { alpha: R, scale: R },
    /// `scale · α(1+α)^α y / ln^{1+α} y` for `y ≥ e^{1+α}`, zero below.
    Log { alpha: R, scale: R },
}

impl<R: Real> ScaledAsla<R> {
    pub fn eval(&self, y: R) -> R {
        match self {
            ScaledAsla::Step(s) => s.eval(y),
            ScaledAsla::Power { alpha, scale } => *scale * *alpha * y.powf(R::one() - *alpha),
            ScaledAsla::Log { alpha, scale } => {
                let a = *alpha;
                if y < log_threshold(a) {
                    R::zero()
                } else {
                    *scale * a * (R::one() + a).powf(a) * y / y.ln().powf(R::one() + a)
                }
            }
        }
    }

    /// Multiplies the function by `k ≥ 0`.
    pub fn scaled(&self, k: R) -> Self {
        match self {
            ScaledAsla::Step(s) => ScaledAsla::Step(StepFunction::from_raw(
                s.locations.clone(),
                s.jumps.iter().map(|&v| v * k).collect(),
                s.levels.iter().map(|&v| v * k).collect(),
            )),
            ScaledAsla::Power { alpha, scale } => ScaledAsla::Power { alpha: *alpha, scale: *scale * k },
            ScaledAsla::Log { alpha, scale } => ScaledAsla::Log { alpha: *alpha, scale: *scale * k },
        }
    }

    /// `lim_{y→∞} F(y)`, possibly infinite.
    pub fn limit_at_infinity(&self) -> R {
        match self {
            ScaledAsla::Step(s) => s.levels.last().copied().unwrap_or_else(R::zero),
            ScaledAsla::Power { scale, .. } | ScaledAsla::Log { scale, .. } => {
                if *scale > R::zero() {
                    R::infinity()
                } else {
                    R::zero()
                }
            }
        }
    }

    pub fn breakpoints(&self) -> Vec<R> {
        match self {
            ScaledAsla::Step(s) => s.locations.clone(),
            ScaledAsla::Power { .. } => Vec::new(),
            ScaledAsla::Log { alpha, .. } => vec![log_threshold(*alpha)],
        }
    }
}
