//! Adaptive Gauss–Kronrod quadrature and the `∫ f(y) y⁻² dy` integral over `[a, ∞)`.
//!
//! The improper integral is accumulated decade by decade in the variable `t = ln y`.
//! Convergence is accepted once the decade contributions decay geometrically and the
//! extrapolated remainder is below tolerance. When the decades run out, the integral is
//! declared infinite if `f(y)/y` stays above a fixed threshold over three further
//! decades; otherwise an accuracy error is returned.

use crate::error::{Error, Result};
use crate::scalar::Real;

// 15-point Kronrod nodes (non-negative half) and weights, with the embedded 7-point Gauss weights.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Threshold on `f(y)/y` used by the divergence detector.
pub const DIVERGENCE_RATIO: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct QuadOptions<R> {
    pub rel_tol: R,
    pub abs_tol: R,
    /// Bisections allowed per finite interval.
    pub max_subdivisions: usize,
    /// Points where the integrand may jump or kink; intervals are split there.
    pub breakpoints: Vec<R>,
    /// Upper limit on the number of decades walked by [`integrate_inverse_square`].
    pub max_decades: usize,
}

impl<R: Real> Default for QuadOptions<R> {
    fn default() -> Self {
        QuadOptions {
            rel_tol: R::lit(1e-10),
            abs_tol: R::lit(1e-12),
            max_subdivisions: 400,
            breakpoints: Vec::new(),
            max_decades: 200,
        }
    }
}

impl<R: Real> QuadOptions<R> {
    pub fn with_breakpoints(mut self, points: impl IntoIterator<Item = R>) -> Self {
        self.breakpoints.extend(points);
        self
    }

    pub fn with_tolerance(mut self, rel_tol: R) -> Self {
        self.rel_tol = rel_tol;
        self
    }
}

/// Value of an improper integral that may diverge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Integral<R> {
    Finite { value: R, error: R },
    Infinite,
}

impl<R: Real> Integral<R> {
    pub fn value(&self) -> R {
        match *self {
            Integral::Finite { value, .. } => value,
            Integral::Infinite => R::infinity(),
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Integral::Finite { .. })
    }

    pub fn exact(value: R) -> Self {
        if value.is_finite() {
            Integral::Finite { value, error: R::zero() }
        } else {
            Integral::Infinite
        }
    }
}

fn gk15<R: Real, F: Fn(R) -> R>(f: &F, a: R, b: R) -> (R, R) {
    let half = R::lit(0.5);
    let center = half * (a + b);
    let half_len = half * (b - a);
    let fc = f(center);
    let mut kronrod = fc * R::lit(WGK[7]);
    let mut gauss = fc * R::lit(WG[3]);
    for j in 0..7 {
        let dx = half_len * R::lit(XGK[j]);
        let pair = f(center - dx) + f(center + dx);
        kronrod = kronrod + R::lit(WGK[j]) * pair;
        if j % 2 == 1 {
            gauss = gauss + R::lit(WG[j / 2]) * pair;
        }
    }
    let value = kronrod * half_len;
    let error = ((kronrod - gauss) * half_len).abs();
    (value, error)
}

/// Globally adaptive GK15 on `[a, b]`, returning `(value, error estimate)`.
pub fn integrate<R: Real, F: Fn(R) -> R>(f: F, a: R, b: R, opts: &QuadOptions<R>) -> Result<(R, R)> {
    if !(b > a) {
        return Ok((R::zero(), R::zero()));
    }
    let mut cuts: Vec<R> = vec![a];
    let mut inner: Vec<R> = opts.breakpoints.iter().copied().filter(|&p| p > a && p < b).collect();
    inner.sort_by(|x, y| x.partial_cmp(y).unwrap());
    inner.dedup();
    cuts.extend(inner);
    cuts.push(b);

    let mut pieces: Vec<(R, R, R, R)> = cuts
        .windows(2)
        .map(|w| {
            let (v, e) = gk15(&f, w[0], w[1]);
            (w[0], w[1], v, e)
        })
        .collect();

    for _ in 0..opts.max_subdivisions {
        let total: R = pieces.iter().fold(R::zero(), |s, p| s + p.2);
        let err: R = pieces.iter().fold(R::zero(), |s, p| s + p.3);
        if err <= opts.abs_tol.max(opts.rel_tol * total.abs()) {
            return Ok((total, err));
        }
        let (worst, _) = pieces
            .iter()
            .enumerate()
            .fold((0, R::neg_infinity()), |acc, (i, p)| if p.3 > acc.1 { (i, p.3) } else { acc });
        let (lo, hi, _, _) = pieces[worst];
        let mid = R::lit(0.5) * (lo + hi);
        if !(mid > lo && mid < hi) {
            break;
        }
        let (v1, e1) = gk15(&f, lo, mid);
        let (v2, e2) = gk15(&f, mid, hi);
        pieces[worst] = (lo, mid, v1, e1);
        pieces.push((mid, hi, v2, e2));
    }
    let total: R = pieces.iter().fold(R::zero(), |s, p| s + p.2);
    let err: R = pieces.iter().fold(R::zero(), |s, p| s + p.3);
    if err <= opts.abs_tol.max(opts.rel_tol * total.abs()) {
        Ok((total, err))
    } else {
        Err(Error::Accuracy { estimate: total.as_f64(), error: err.as_f64(), tol: opts.rel_tol.as_f64() })
    }
}

/// `∫ₐ^∞ f(y) y⁻² dy` for nonnegative `f`, with geometric tail extrapolation and the
/// `f(y)/y` divergence detector.
pub fn integrate_inverse_square<R: Real, F: Fn(R) -> R>(f: F, from: R, opts: &QuadOptions<R>) -> Result<Integral<R>> {
    if !(from > R::zero()) || !from.is_finite() {
        return Err(Error::Domain(format!("lower limit must be positive and finite, got {from}")));
    }
    let ten = R::lit(10.0);
    let ln_ten = ten.ln();
    // Decades that stay representable, leaving room for the three-decade divergence probe.
    let room = ((R::max_value().ln() - from.ln()) / ln_ten).floor().to_usize().unwrap_or(0);
    let decades = opts.max_decades.min(room.saturating_sub(4));
    let last_break = opts.breakpoints.iter().copied().fold(from, R::max);

    let integrand = |t: R| {
        let y = t.exp();
        let v = f(y);
        if v == R::zero() {
            R::zero()
        } else {
            v / y
        }
    };
    let log_opts = QuadOptions {
        breakpoints: opts.breakpoints.iter().filter(|p| **p > R::zero()).map(|p| p.ln()).collect(),
        abs_tol: opts.abs_tol / R::lit(4.0),
        ..opts.clone()
    };

    let mut total = R::zero();
    let mut err = R::zero();
    let mut prev: Option<R> = None;
    let mut prev_ratio: Option<R> = None;
    let mut lo = from;
    for k in 0..decades {
        let hi = lo * ten;
        let (c, e) = integrate(integrand, lo.ln(), hi.ln(), &log_opts)?;
        total = total + c;
        err = err + e;
        let ratio = prev.map(|p| if p > R::zero() { c / p } else if c > R::zero() { R::infinity() } else { R::zero() });
        if k >= 2 && hi > last_break {
            if let (Some(r1), Some(r0)) = (ratio, prev_ratio) {
                let rho = r1.max(r0);
                if rho < R::lit(0.95) {
                    let tail = c * rho / (R::one() - rho);
                    let bound = opts.abs_tol.max(opts.rel_tol * total.abs());
                    if tail + err <= bound {
                        return Ok(Integral::Finite { value: total + tail, error: tail + err });
                    }
                }
            }
        }
        prev_ratio = ratio;
        prev = Some(c);
        lo = hi;
    }

    let delta = R::lit(DIVERGENCE_RATIO);
    let mut y = lo;
    let mut diverging = true;
    for _ in 0..3 {
        y = y * ten;
        if !(f(y) / y > delta) {
            diverging = false;
        }
    }
    if diverging {
        Ok(Integral::Infinite)
    } else {
        Err(Error::Accuracy { estimate: total.as_f64(), error: err.as_f64(), tol: opts.rel_tol.as_f64() })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gk_integrates_polynomials_exactly() {
        let opts = QuadOptions::<f64>::default();
        let (v, _) = integrate(|x| x.powi(5) - 3.0 * x, 0.0, 2.0, &opts).unwrap();
        assert!((v - (64.0 / 6.0 - 6.0)).abs() < 1e-13);
    }

    #[test]
    fn breakpoints_handle_steps() {
        let opts = QuadOptions::<f64>::default().with_breakpoints([1.5]);
        let (v, _) = integrate(|x| if x >= 1.5 { 2.0 } else { 0.0 }, 0.0, 3.0, &opts).unwrap();
        assert!((v - 3.0).abs() < 1e-12);
    }

    #[test]
    fn constant_one_integrates_to_one() {
        let v = integrate_inverse_square(|_| 1.0_f64, 1.0, &QuadOptions::default()).unwrap();
        assert!((v.value() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn identity_diverges() {
        let v = integrate_inverse_square(|y: f64| y, 1.0, &QuadOptions::default()).unwrap();
        assert_eq!(v, Integral::Infinite);
    }

    #[test]
    fn slow_power_tail_is_extrapolated() {
        let alpha = 0.1_f64;
        let v = integrate_inverse_square(|y: f64| alpha * y.powf(1.0 - alpha), 1.0, &QuadOptions::default()).unwrap();
        assert!((v.value() - 1.0).abs() < 1e-8, "{v:?}");
    }

    #[test]
    fn late_threshold_is_not_missed() {
        let u = 1e7_f64;
        let opts = QuadOptions::default().with_breakpoints([u]);
        let v = integrate_inverse_square(|y: f64| if y >= u { u } else { 0.0 }, 1.0, &opts).unwrap();
        assert!((v.value() - 1.0).abs() < 1e-9, "{v:?}");
    }

    #[test]
    fn rejects_bad_lower_limit() {
        assert!(integrate_inverse_square(|_| 1.0_f64, 0.0, &QuadOptions::default()).is_err());
    }
}
