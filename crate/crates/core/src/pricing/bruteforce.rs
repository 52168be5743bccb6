//! Independent check of the majorant solver: the same knot constraints as a linear program.
//!
//! The primal is `min Σ hᵢ` subject to `A h ≥ b, h ≥ 0`. Its dual `max bᵀy, Aᵀy ≤ 1, y ≥ 0` has
//! the feasible start `y = 0`, so a plain dense simplex on the dual suffices; `h` is read from
//! the reduced costs of the dual slacks. An unbounded dual means the primal is infeasible.

use super::majorant::{tail_closure, GridConfig};
use super::payoff::GeneralPayoff;
use crate::error::{Error, Result};

/// Largest grid the brute force accepts.
pub const MAX_BRUTEFORCE_KNOTS: usize = 64;

const PIVOT_EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub values: Vec<f64>,
    pub terminal_slope: f64,
    /// Largest constraint violation of the returned `h`.
    pub max_violation: f64,
    pub pivots: usize,
}

/// Candidate `X` values at knot `x`: the tabulated fractions, or the two endpoints.
fn candidates(payoff: &GeneralPayoff, x: f64) -> Result<Vec<f64>> {
    match payoff {
        GeneralPayoff::Tabulated { fractions, .. } => Ok(fractions.iter().map(|f| f * x).collect()),
        GeneralPayoff::Custom(_) => Err(Error::Domain("brute force needs a payoff with a finite candidate set".into())),
        _ => Ok(vec![0.0, x]),
    }
}

/// Minimal majorant on a small grid by linear programming. `Ok(None)` means no feasible `H`
/// exists, i.e. an infinite price.
pub fn solve_majorant_bruteforce(payoff: &GeneralPayoff, grid: &[f64]) -> Result<Option<LpSolution>> {
    payoff.validate()?;
    let n = grid.len();
    if !(2..=MAX_BRUTEFORCE_KNOTS).contains(&n) {
        return Err(Error::Domain(format!("brute force takes 2..={MAX_BRUTEFORCE_KNOTS} knots, got {n}")));
    }
    let Some(tail) = tail_closure(payoff, grid[n - 1], GridConfig::default().scan_points)? else {
        return Ok(None);
    };
    let s_t = tail.slope;
    let mut rows: Vec<(Vec<f64>, f64)> = Vec::new();
    let unit = |pairs: &[(usize, f64)]| {
        let mut r = vec![0.0; n];
        for &(j, v) in pairs {
            r[j] += v;
        }
        r
    };
    for i in 0..n {
        let xi = grid[i];
        for x in candidates(payoff, xi)? {
            let f = payoff.eval(xi, x);
            if i + 1 < n {
                let w = (x - xi) / (grid[i + 1] - xi);
                rows.push((unit(&[(i, 1.0 - w), (i + 1, w)]), f));
            } else {
                rows.push((unit(&[(i, 1.0)]), f + s_t * (xi - x)));
            }
        }
    }
    rows.push((unit(&[(n - 1, 1.0)]), tail.value));
    for i in 0..n - 1 {
        let d0 = grid[i + 1] - grid[i];
        if i + 2 < n {
            let d1 = grid[i + 2] - grid[i + 1];
            // (h₁ − h₀)/d₀ − (h₂ − h₁)/d₁ ≥ 0
            rows.push((unit(&[(i, -1.0 / d0), (i + 1, 1.0 / d0 + 1.0 / d1), (i + 2, -1.0 / d1)]), 0.0));
        } else {
            rows.push((unit(&[(i, -1.0 / d0), (i + 1, 1.0 / d0)]), s_t.max(0.0)));
        }
        rows.push((unit(&[(i, -1.0 / d0), (i + 1, 1.0 / d0)]), 0.0));
    }

    let Some((h, pivots)) = dual_simplex(&rows, n) else {
        return Ok(None);
    };
    let max_violation = rows
        .iter()
        .map(|(a, b)| b - a.iter().zip(&h).map(|(x, y)| x * y).sum::<f64>())
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(Some(LpSolution { values: h, terminal_slope: s_t, max_violation, pivots }))
}

/// Solves `max bᵀy` s.t. `Σ_r y_r a_r ≤ 1`, `y ≥ 0` by the tableau method and returns the
/// primal `h` (multipliers of the `n` dual rows), or `None` if the dual is unbounded.
fn dual_simplex(rows: &[(Vec<f64>, f64)], n: usize) -> Option<(Vec<f64>, usize)> {
    let m = rows.len();
    let cols = m + n;
    // tableau: n rows, columns = y_0..y_{m-1}, s_0..s_{n-1}, rhs
    let mut t = vec![vec![0.0; cols + 1]; n];
    for (r, (a, _)) in rows.iter().enumerate() {
        for j in 0..n {
            t[j][r] = a[j];
        }
    }
    for j in 0..n {
        t[j][m + j] = 1.0;
        t[j][cols] = 1.0;
    }
    // reduced costs d_k = c_k − π·A_k for the maximization objective
    let mut d = vec![0.0; cols];
    for (r, (_, b)) in rows.iter().enumerate() {
        d[r] = *b;
    }
    let mut basis: Vec<usize> = (m..m + n).collect();
    let mut pivots = 0;
    let bland_after = 50 * (m + n);
    loop {
        let use_bland = pivots > bland_after;
        let mut enter = None;
        let mut best = PIVOT_EPS;
        for (k, &dk) in d.iter().enumerate() {
            if dk > best {
                enter = Some(k);
                if use_bland {
                    break;
                }
                best = dk;
            }
        }
        let Some(e) = enter else { break };
        let mut leave: Option<usize> = None;
        let mut ratio = f64::INFINITY;
        for r in 0..n {
            if t[r][e] > PIVOT_EPS {
                let q = t[r][cols] / t[r][e];
                let better = match leave {
                    None => true,
                    Some(l) => q < ratio - 1e-15 || (q <= ratio + 1e-15 && basis[r] < basis[l]),
                };
                if better {
                    ratio = q;
                    leave = Some(r);
                }
            }
        }
        let l = leave?;
        let p = t[l][e];
        for v in t[l].iter_mut() {
            *v /= p;
        }
        let pivot_row = t[l].clone();
        for (r, row) in t.iter_mut().enumerate() {
            if r != l && row[e] != 0.0 {
                let f = row[e];
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
            }
        }
        let f = d[e];
        for (dk, pv) in d.iter_mut().zip(&pivot_row) {
            *dk -= f * pv;
        }
        basis[l] = e;
        pivots += 1;
        if pivots > 200 * (m + n) {
            return None;
        }
    }
    Some(((0..n).map(|j| -d[m + j]).collect(), pivots))
}

#[cfg(test)]
mod tests {
    use super::super::majorant::{solve_majorant, Scheme};
    use super::super::payoff::SimplePayoff;
    use super::*;

    fn grid(n: usize) -> Vec<f64> {
        (0..n).map(|i| 10f64.powf(2.0 * i as f64 / (n - 1) as f64)).collect()
    }

    #[test]
    fn constant_payoff() {
        let p = GeneralPayoff::SimpleLift(SimplePayoff::Constant { k: 1.0 });
        let s = solve_majorant_bruteforce(&p, &grid(16)).unwrap().unwrap();
        assert!(s.values.iter().all(|h| (h - 1.0).abs() < 1e-9), "{:?}", s.values);
    }

    #[test]
    fn matches_fixed_point_solver_on_capped() {
        let p = GeneralPayoff::SimpleLift(SimplePayoff::Capped { cap: std::f64::consts::E });
        let g = grid(32);
        let lp = solve_majorant_bruteforce(&p, &g).unwrap().unwrap();
        let fp = solve_majorant(&p, &g, Scheme::Knot, &GridConfig::default()).unwrap().unwrap();
        assert!(lp.max_violation < 1e-9);
        for (a, b) in lp.values.iter().zip(&fp.values) {
            assert!((a - b).abs() < 1e-6, "{a} {b}");
        }
    }

    #[test]
    fn rejects_large_grids() {
        let p = GeneralPayoff::SimpleLift(SimplePayoff::Constant { k: 1.0 });
        assert!(solve_majorant_bruteforce(&p, &grid(65)).is_err());
    }
}
