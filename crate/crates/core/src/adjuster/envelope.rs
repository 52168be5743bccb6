use super::piecewise::PiecewiseLinear;
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Smallest concave increasing majorant of tabulated data.
#[derive(Debug, Clone, PartialEq)]
pub struct Envelope<R> {
    pub function: PiecewiseLinear<R>,
    /// Set when `H(x)/x` fails to decrease over the upper half of the grid, i.e. the data
    /// look like they need a linearly growing majorant.
    pub unbounded_growth: bool,
}

/// Prefix maxima `F*(xᵢ) = max_{j ≤ i} F(xⱼ)`.
pub fn running_sup<R: Real>(values: &[R]) -> Vec<R> {
    let mut out = Vec::with_capacity(values.len());
    let mut m = R::neg_infinity();
    for &v in values {
        m = m.max(v);
        out.push(m);
    }
    out
}

/// Running supremum of `f` tabulated on an increasing grid.
pub fn running_sup_envelope<R: Real, F: Fn(R) -> R>(grid: &[R], f: F) -> Vec<R> {
    let values: Vec<R> = grid.iter().map(|&x| f(x)).collect();
    running_sup(&values)
}

/// Smallest concave increasing function above the points `(xs[i], ys[i])`, flat after
/// its maximum.
pub fn concave_increasing_envelope<R: Real>(xs: &[R], ys: &[R]) -> Result<Envelope<R>> {
    concave_envelope_with_slope(xs, ys, R::zero())
}

/// Smallest concave majorant whose slope never drops below `min_slope`.
///
/// Equivalent to taking the increasing concave envelope of `y − min_slope·x` and adding the
/// line back; `min_slope` becomes the terminal slope.
pub fn concave_envelope_with_slope<R: Real>(xs: &[R], ys: &[R], min_slope: R) -> Result<Envelope<R>> {
    if xs.len() != ys.len() || xs.is_empty() {
        return Err(Error::Domain(format!("envelope needs matching non-empty grids ({} vs {})", xs.len(), ys.len())));
    }
    if xs.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Domain("envelope grid must be strictly increasing".into()));
    }
    if ys.iter().any(|y| !y.is_finite()) {
        return Err(Error::Domain("envelope values must be finite".into()));
    }
    let g: Vec<R> = xs.iter().zip(ys).map(|(&x, &y)| y - min_slope * x).collect();

    // upper hull by monotone chain
    let mut hull: Vec<usize> = Vec::with_capacity(xs.len());
    for i in 0..xs.len() {
        while hull.len() >= 2 {
            let o = hull[hull.len() - 2];
            let a = hull[hull.len() - 1];
            let cross = (xs[a] - xs[o]) * (g[i] - g[o]) - (g[a] - g[o]) * (xs[i] - xs[o]);
            if cross >= R::zero() {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(i);
    }
    // keep the increasing part; the rest becomes flat
    let top = hull
        .iter()
        .enumerate()
        .fold(0, |best, (j, &i)| if g[i] > g[hull[best]] { j } else { best });
    hull.truncate(top + 1);

    let n = xs.len();
    let mut values = Vec::with_capacity(n);
    let mut slopes = Vec::with_capacity(n);
    let mut seg = 0;
    for i in 0..n {
        while seg + 1 < hull.len() && hull[seg + 1] <= i {
            seg += 1;
        }
        let (v, s) = if seg + 1 < hull.len() {
            let (a, b) = (hull[seg], hull[seg + 1]);
            let s = (g[b] - g[a]) / (xs[b] - xs[a]);
            let v = if i == a { g[a] } else { g[a] + s * (xs[i] - xs[a]) };
            (v, s)
        } else {
            (g[hull[seg]], R::zero())
        };
        values.push(v + min_slope * xs[i]);
        slopes.push(s + min_slope);
    }
    let unbounded_growth = growth_flag(xs, &values);
    Ok(Envelope { function: PiecewiseLinear::from_raw(xs.to_vec(), values, slopes), unbounded_growth })
}

/// `H(x)/x` not decreasing between the middle and the end of the grid.
pub(crate) fn growth_flag<R: Real>(xs: &[R], h: &[R]) -> bool {
    let n = xs.len();
    let mid = n / 2;
    if n < 3 || !(h[n - 1] > R::zero()) || !(xs[mid] > R::zero()) {
        return false;
    }
    h[n - 1] / xs[n - 1] >= (R::one() - R::lit(1e-9)) * h[mid] / xs[mid]
}
