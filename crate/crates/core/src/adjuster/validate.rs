use super::ala::Ala;
use super::ala_to_spine;
use super::spine::Spine;
use crate::scalar::Real;
use std::fmt;

/// The properties a spine or ALA must have.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Condition {
    /// A family parameter is outside its admissible range.
    Parameter,
    ValueAtOne,
    SlopeAtOne,
    Increasing,
    Concave,
    /// Stored values and slopes of a piecewise-linear spine disagree.
    Representation,
    Linearity,
    SlopeAgreement,
    Positivity,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub condition: Condition,
    /// Witness point (`X` for spines, `X*` for ALAs).
    pub at: f64,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, condition: Condition) -> bool {
        self.violations.iter().any(|v| v.condition == condition)
    }

    pub fn first(&self, condition: Condition) -> Option<&Violation> {
        self.violations.iter().find(|v| v.condition == condition)
    }

    fn push(&mut self, condition: Condition, at: f64, detail: String) {
        self.violations.push(Violation { condition, at, detail });
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "valid");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{:?} at {}: {}", v.condition, v.at, v.detail)?;
        }
        Ok(())
    }
}

const EXACT_TOL: f64 = 1e-12;

/// Checks a spine analytically (closed forms) or exactly (piecewise linear).
pub fn validate_spine<R: Real>(s: &Spine<R>) -> ValidationReport {
    let mut report = ValidationReport::default();
    check_spine(s, &mut report);
    report
}

fn check_spine<R: Real>(s: &Spine<R>, report: &mut ValidationReport) {
    match s {
        Spine::Power { alpha } => {
            if !(*alpha > R::zero() && *alpha < R::one()) {
                report.push(Condition::Parameter, 1.0, format!("power alpha {alpha} outside (0,1)"));
            }
        }
        Spine::Log { alpha } => {
            if !(*alpha > R::zero() && alpha.is_finite()) {
                report.push(Condition::Parameter, 1.0, format!("log alpha {alpha} must be positive"));
            }
        }
        Spine::CashMix { cash, inner } => {
            if !(*cash >= R::zero() && *cash <= R::one()) {
                report.push(Condition::Parameter, 1.0, format!("cash fraction {cash} outside [0,1]"));
            }
            check_spine(inner, report);
        }
        Spine::Piecewise(f) => {
            let (knots, values, slopes) = (f.knots(), f.values(), f.slopes());
            let tol = R::lit(EXACT_TOL);
            if knots[0] != R::one() {
                report.push(Condition::ValueAtOne, knots[0].as_f64(), "first knot is not 1".into());
            } else if (values[0] - R::one()).abs() > tol {
                report.push(Condition::ValueAtOne, 1.0, format!("S(1) = {}", values[0]));
            }
            if slopes[0] > R::one() {
                report.push(Condition::SlopeAtOne, knots[0].as_f64(), format!("right slope {} > 1", slopes[0]));
            }
            for i in 0..knots.len() {
                if slopes[i] < R::zero() {
                    report.push(Condition::Increasing, knots[i].as_f64(), format!("slope {} < 0", slopes[i]));
                }
                if i > 0 && slopes[i] > slopes[i - 1] {
                    report.push(
                        Condition::Concave,
                        knots[i].as_f64(),
                        format!("slope rises from {} to {}", slopes[i - 1], slopes[i]),
                    );
                }
                if i + 1 < knots.len() {
                    let predicted = values[i] + slopes[i] * (knots[i + 1] - knots[i]);
                    if (predicted - values[i + 1]).abs() > tol * R::one().max(values[i + 1].abs()) {
                        report.push(
                            Condition::Representation,
                            knots[i + 1].as_f64(),
                            format!("value {} but slope predicts {}", values[i + 1], predicted),
                        );
                    }
                }
            }
        }
    }
}

/// Checks a black-box spine on a sampled grid with relative tolerance `tol`.
///
/// Only certain violations are reported: for a concave function the right derivative at 1 is
/// at least any chord from 1, so a chord steeper than 1 proves the slope condition fails.
pub fn validate_spine_fn<R: Real, F: Fn(R) -> R>(f: F, grid: &[R], tol: R) -> ValidationReport {
    let mut report = ValidationReport::default();
    let one = R::one();
    let f1 = f(one);
    if (f1 - one).abs() > tol {
        report.push(Condition::ValueAtOne, 1.0, format!("S(1) = {f1}"));
    }
    let h = R::lit(1e-7);
    let chord = (f(one + h) - f1) / h;
    if chord > one + R::lit(1e-6).max(tol) {
        report.push(Condition::SlopeAtOne, 1.0, format!("chord slope {chord} > 1 just right of 1"));
    }
    let pts: Vec<R> = grid.iter().copied().filter(|&x| x >= one).collect();
    let vals: Vec<R> = pts.iter().map(|&x| f(x)).collect();
    let mut prev_slope: Option<R> = None;
    for i in 1..pts.len() {
        let scale = one.max(vals[i].abs());
        if vals[i] < vals[i - 1] - tol * scale {
            report.push(Condition::Increasing, pts[i].as_f64(), format!("S drops from {} to {}", vals[i - 1], vals[i]));
        }
        let s = (vals[i] - vals[i - 1]) / (pts[i] - pts[i - 1]);
        if let Some(p) = prev_slope {
            if s > p + tol * one.max(p.abs()) {
                report.push(Condition::Concave, pts[i - 1].as_f64(), format!("chord slope rises from {p} to {s}"));
            }
        }
        prev_slope = Some(s);
    }
    report
}

/// Checks an ALA: its spine exactly, then linearity, slope agreement and positivity on a grid.
pub fn validate_ala<R: Real>(a: &Ala<R>) -> ValidationReport {
    let spine = ala_to_spine(a);
    let mut report = validate_spine(&spine);
    let mut grid: Vec<R> = (0..=120).map(|i| R::lit(10f64.powf(i as f64 / 20.0))).collect();
    grid.extend(spine.breakpoints());
    grid.sort_by(|x, y| x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal));
    grid.dedup();
    let sampled = validate_ala_fn(|xs, x| a.value(xs, x), &grid, R::lit(1e-9));
    report.violations.extend(
        sampled
            .violations
            .into_iter()
            .filter(|v| matches!(v.condition, Condition::Linearity | Condition::SlopeAgreement | Condition::Positivity)),
    );
    report
}

/// Checks a black-box ALA `(X*, X) ↦ A(X*, X)` on a sampled grid of `X*` values.
pub fn validate_ala_fn<R: Real, F: Fn(R, R) -> R>(f: F, grid: &[R], tol: R) -> ValidationReport {
    let mut report = validate_spine_fn(|x| f(x, x), grid, tol);
    let one = R::one();
    let half = R::lit(0.5);
    for &xs in grid.iter().filter(|&&x| x >= one) {
        let v0 = f(xs, R::zero());
        let vh = f(xs, xs * half);
        let v1 = f(xs, xs);
        let scale = one.max(v0.abs()).max(v1.abs());
        if (vh - (v0 + v1) * half).abs() > tol * scale {
            report.push(Condition::Linearity, xs.as_f64(), format!("A(X*,X*/2) = {vh}, midpoint {}", (v0 + v1) * half));
        }
        if v0 < -tol * scale {
            report.push(Condition::Positivity, xs.as_f64(), format!("A(X*,0) = {v0}"));
        }
        // concavity brackets the right derivative between the right and left chords
        let slope = (v1 - v0) / xs;
        let h = R::lit(1e-6) * xs;
        let slack = R::lit(1e-6) * one.max(slope.abs());
        let right = (f(xs + h, xs + h) - v1) / h;
        if slope < right - slack {
            report.push(Condition::SlopeAgreement, xs.as_f64(), format!("slope {slope} below right chord {right}"));
        }
        if xs - h >= one {
            let left = (v1 - f(xs - h, xs - h)) / h;
            if slope > left + slack {
                report.push(Condition::SlopeAgreement, xs.as_f64(), format!("slope {slope} above left chord {left}"));
            }
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::super::piecewise::PiecewiseLinear;
    use super::super::{measure_to_ala, DiscreteMeasure};
    use super::*;

    fn grid() -> Vec<f64> {
        (0..=100).map(|i| 10f64.powf(i as f64 / 25.0)).collect()
    }

    #[test]
    fn closed_form_examples() {
        assert!(validate_spine(&Spine::Power { alpha: 0.5 }).is_valid());
        assert!(validate_spine(&Spine::Power { alpha: 0.5f64 }).is_valid());
        assert!(validate_spine(&Spine::Power { alpha: 1.5 }).has(Condition::Parameter));
        assert!(validate_spine(&Spine::Log { alpha: 1.0 }).is_valid());
    }

    #[test]
    fn piecewise_witnesses() {
        let square = PiecewiseLinear::new(vec![1.0, 2.0, 3.0], vec![1.0, 4.0, 9.0], 7.0).unwrap();
        let r = validate_spine(&Spine::Piecewise(square));
        assert_eq!(r.first(Condition::Concave).unwrap().at, 2.0);
        let steep = PiecewiseLinear::new(vec![1.0, 2.0], vec![1.0, 3.0], 2.0).unwrap();
        let r = validate_spine(&Spine::Piecewise(steep));
        assert_eq!(r.first(Condition::SlopeAtOne).unwrap().at, 1.0);
        assert!(!r.has(Condition::Concave));
    }

    #[test]
    fn black_box_examples() {
        let g = grid();
        assert!(validate_spine_fn(|x: f64| x.sqrt(), &g, 1e-9).is_valid());
        let r = validate_spine_fn(|x: f64| x * x, &g, 1e-9);
        assert!(r.has(Condition::Concave));
        let r = validate_spine_fn(|x: f64| 2.0 * x - 1.0, &g, 1e-9);
        assert_eq!(r.first(Condition::SlopeAtOne).unwrap().at, 1.0);
        assert!(!r.has(Condition::Concave));
    }

    #[test]
    fn ala_checks() {
        let p = DiscreteMeasure::from_pairs(&[(2.0, 0.5), (4.0, 0.25)], 0.25).unwrap();
        assert!(validate_ala(&measure_to_ala(&p)).is_valid());
        assert!(validate_ala(&Ala::FromSpine(Spine::Power { alpha: 0.5 })).is_valid());
        // right idea, wrong slope
        let r = validate_ala_fn(|xs: f64, x: f64| xs.sqrt() + 0.9 * (x - xs), &grid(), 1e-9);
        assert!(r.has(Condition::SlopeAgreement));
        let r = validate_ala_fn(|xs: f64, x: f64| xs.sqrt() * (x / xs).sqrt(), &grid(), 1e-9);
        assert!(r.has(Condition::Linearity));
    }
}
