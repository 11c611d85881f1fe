//! The moment-matching program
//!
//! ```text
//! sup E[1/X] - E[1/X']  over X, X' supported on [a, b] with E[X^j] = E[X'^j], j = 1..L
//! ```
//!
//! discretized on a Chebyshev-Lobatto grid and solved as a linear program. Its value is
//! `2 E_L(1/x, [a, b])`, twice the best approximation error of degree `L`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::theory::remez::{interpolate_inverse, residual_dd};

const PIVOT_TOL: f64 = 1e-11;
const COST_TOL: f64 = 1e-12;

/// `max c.x` subject to `A x = b`, `x >= 0`, by the two-phase tableau simplex.
///
/// Pricing is Dantzig's largest reduced cost; after a run of degenerate pivots it
/// switches to Bland's rule, which cannot cycle.
#[derive(Debug, Clone)]
pub struct LinearProgram {
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub value: f64,
    pub x: Vec<f64>,
    pub pivots: usize,
}

struct Tableau {
    // rows x (cols + 1); last column is the right-hand side
    t: Vec<Vec<f64>>,
    basis: Vec<usize>,
    cols: usize,
    pivots: usize,
}

impl Tableau {
    fn pivot(&mut self, row: usize, col: usize) {
        let p = self.t[row][col];
        for v in self.t[row].iter_mut() {
            *v /= p;
        }
        let pivot_row = self.t[row].clone();
        for (i, r) in self.t.iter_mut().enumerate() {
            if i == row {
                continue;
            }
            let f = r[col];
            if f != 0.0 {
                for (v, pv) in r.iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
                r[col] = 0.0;
            }
        }
        self.basis[row] = col;
        self.pivots += 1;
    }

    fn reduced_costs(&self, cost: &[f64], allowed: usize) -> Vec<f64> {
        let mut d: Vec<f64> = cost[..allowed].to_vec();
        for (row, &bj) in self.t.iter().zip(&self.basis) {
            let cb = cost[bj];
            if cb != 0.0 {
                for (dj, v) in d.iter_mut().zip(row) {
                    *dj -= cb * v;
                }
            }
        }
        d
    }

    // Maximizes cost over the first `allowed` columns.
    fn optimize(&mut self, cost: &[f64], allowed: usize, max_pivots: usize) -> Result<()> {
        let rhs = self.cols;
        let mut degenerate_run = 0usize;
        loop {
            if self.pivots > max_pivots {
                return Err(Error::NonConvergence {
                    iterations: self.pivots,
                    detail: "simplex pivot limit reached".into(),
                });
            }
            let d = self.reduced_costs(cost, allowed);
            let bland = degenerate_run > 50;
            let entering = if bland {
                (0..allowed).find(|&j| d[j] > COST_TOL)
            } else {
                (0..allowed)
                    .filter(|&j| d[j] > COST_TOL)
                    .max_by(|&i, &j| d[i].total_cmp(&d[j]))
            };
            let Some(col) = entering else { return Ok(()) };
            let mut leave: Option<(usize, f64)> = None;
            for (i, row) in self.t.iter().enumerate() {
                if row[col] > PIVOT_TOL {
                    let ratio = row[rhs] / row[col];
                    let better = match leave {
                        None => true,
                        Some((li, lr)) => {
                            ratio < lr - 1e-14 || (ratio <= lr + 1e-14 && self.basis[i] < self.basis[li])
                        }
                    };
                    if better {
                        leave = Some((i, ratio));
                    }
                }
            }
            let Some((row, ratio)) = leave else {
                return Err(Error::Internal("linear program is unbounded".into()));
            };
            degenerate_run = if ratio.abs() < 1e-14 { degenerate_run + 1 } else { 0 };
            self.pivot(row, col);
        }
    }
}

impl LinearProgram {
    pub fn solve(&self) -> Result<LpSolution> {
        let m = self.b.len();
        let n = self.c.len();
        if self.a.len() != m || self.a.iter().any(|r| r.len() != n) {
            return Err(Error::param("constraint matrix shape does not match"));
        }
        // columns: n structural, m artificial, then rhs
        let cols = n + m;
        let mut t = Vec::with_capacity(m);
        for (i, (row, &bi)) in self.a.iter().zip(&self.b).enumerate() {
            let sign = if bi < 0.0 { -1.0 } else { 1.0 };
            let mut r: Vec<f64> = row.iter().map(|v| sign * v).collect();
            r.extend((0..m).map(|k| if k == i { 1.0 } else { 0.0 }));
            r.push(sign * bi);
            t.push(r);
        }
        let mut tab = Tableau {
            t,
            basis: (n..n + m).collect(),
            cols,
            pivots: 0,
        };
        let max_pivots = 50 * (cols + m) + 1000;

        let mut phase1 = vec![0.0; cols];
        for v in &mut phase1[n..] {
            *v = -1.0;
        }
        tab.optimize(&phase1, cols, max_pivots)?;
        let infeasibility: f64 = tab
            .basis
            .iter()
            .zip(&tab.t)
            .filter(|(&bj, _)| bj >= n)
            .map(|(_, r)| r[cols])
            .sum();
        let scale = self.b.iter().fold(1.0f64, |acc, v| acc.max(v.abs()));
        if infeasibility > 1e-9 * scale {
            return Err(Error::Internal(format!(
                "linear program is infeasible (phase one residual {infeasibility:e})"
            )));
        }
        // drive artificials out of the basis where a structural column can replace them
        for row in 0..m {
            if tab.basis[row] >= n {
                if let Some(col) = (0..n).find(|&j| tab.t[row][j].abs() > 1e-9) {
                    tab.pivot(row, col);
                }
            }
        }
        let mut phase2 = self.c.clone();
        phase2.extend(std::iter::repeat(0.0).take(m));
        tab.optimize(&phase2, n, max_pivots)?;

        let mut x = vec![0.0; n];
        for (row, &bj) in tab.t.iter().zip(&tab.basis) {
            if bj < n {
                x[bj] = row[cols];
            }
        }
        let value = x.iter().zip(&self.c).map(|(xi, ci)| xi * ci).sum();
        Ok(LpSolution {
            value,
            x,
            pivots: tab.pivots,
        })
    }
}

/// Optimal value and optimizing distributions of the discretized program.
#[derive(Debug, Clone, Serialize)]
pub struct PrimalSolution {
    pub value: f64,
    /// `(atom, probability)` pairs of `X`.
    pub x: Vec<(f64, f64)>,
    /// `(atom, probability)` pairs of `X'`.
    pub x_prime: Vec<(f64, f64)>,
    pub grid_size: usize,
}

/// Chebyshev-Lobatto points of `[a, b]`, endpoints included.
pub fn lobatto_grid(a: f64, b: f64, size: usize) -> Vec<f64> {
    let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
    (0..size)
        .map(|i| {
            if i == 0 {
                a
            } else if i + 1 == size {
                b
            } else {
                mid - half * (std::f64::consts::PI * i as f64 / (size - 1) as f64).cos()
            }
        })
        .collect()
}

pub fn primal_solution(degree: usize, a: f64, b: f64, grid_size: usize) -> Result<PrimalSolution> {
    if !(a > 0.0 && b > a && b.is_finite()) {
        return Err(Error::param(format!("need 0 < a < b, got [{a}, {b}]")));
    }
    if grid_size < degree + 2 {
        return Err(Error::Precondition(format!(
            "grid of {grid_size} points cannot support {} moment constraints",
            degree + 2
        )));
    }
    let grid = lobatto_grid(a, b, grid_size);
    let g = grid_size;
    // variables: p_0..p_{g-1} (law of X), q_0..q_{g-1} (law of X')
    let mut rows = Vec::with_capacity(degree + 2);
    let mut ones = vec![0.0; 2 * g];
    ones[..g].fill(1.0);
    rows.push(ones.clone());
    ones.rotate_left(g);
    rows.push(ones);
    // matching E[T_j(t)] for j = 1..L is equivalent to matching raw moments
    let ts: Vec<f64> = grid.iter().map(|x| (2.0 * x - a - b) / (b - a)).collect();
    let mut prev = vec![1.0; g];
    let mut cur = ts.clone();
    for _ in 1..=degree {
        let mut row: Vec<f64> = cur.clone();
        row.extend(cur.iter().map(|v| -v));
        rows.push(row);
        let next: Vec<f64> = (0..g).map(|i| 2.0 * ts[i] * cur[i] - prev[i]).collect();
        prev = std::mem::replace(&mut cur, next);
    }
    let mut b_vec = vec![0.0; degree + 2];
    b_vec[0] = 1.0;
    b_vec[1] = 1.0;
    // Every feasible point has E[q(X)] = E[q(X')] for polynomials q of degree <= L, so
    // 1/x may be replaced by its residual against any such q. Using an interpolant keeps
    // the objective coefficients at the size of the optimum instead of 1/a.
    let interp = interpolate_inverse(degree, (a, b))?;
    let resid: Vec<f64> = grid.iter().map(|&x| residual_dd(&interp, x, (a, b))).collect();
    let scale = resid.iter().fold(0.0f64, |m, r| m.max(r.abs()));
    let scale = if scale > 0.0 { scale } else { 1.0 };
    let c: Vec<f64> = resid
        .iter()
        .map(|r| r / scale)
        .chain(resid.iter().map(|r| -r / scale))
        .collect();
    let mut sol = LinearProgram { a: rows, b: b_vec, c }.solve()?;
    sol.value *= scale;
    let atoms = |range: std::ops::Range<usize>| -> Vec<(f64, f64)> {
        range
            .filter(|&i| sol.x[i] > 1e-12)
            .map(|i| (grid[i % g], sol.x[i]))
            .collect()
    };
    Ok(PrimalSolution {
        value: sol.value,
        x: atoms(0..g),
        x_prime: atoms(g..2 * g),
        grid_size,
    })
}

/// Optimal value of the discretized moment-matching program with `degree` matched moments.
pub fn primal_value(degree: usize, a: f64, b: f64, grid_size: usize) -> Result<f64> {
    primal_solution(degree, a, b, grid_size).map(|s| s.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::theory::remez::best_inv_approx;

    #[test]
    fn small_lp() {
        // max x + 2y s.t. x + y + s = 4, x + 3y + u = 6
        let lp = LinearProgram {
            a: vec![vec![1.0, 1.0, 1.0, 0.0], vec![1.0, 3.0, 0.0, 1.0]],
            b: vec![4.0, 6.0],
            c: vec![1.0, 2.0, 0.0, 0.0],
        };
        let s = lp.solve().unwrap();
        assert!((s.value - 5.0).abs() < 1e-12);
        assert!((s.x[0] - 3.0).abs() < 1e-12 && (s.x[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn infeasible_lp_is_internal_error() {
        let lp = LinearProgram {
            a: vec![vec![1.0, 1.0], vec![1.0, 1.0]],
            b: vec![1.0, 2.0],
            c: vec![1.0, 0.0],
        };
        assert!(matches!(lp.solve(), Err(Error::Internal(_))));
    }

    #[test]
    fn no_moments_gives_endpoint_masses() {
        let s = primal_solution(0, 2.0, 7.0, 50).unwrap();
        assert!((s.value - (0.5 - 1.0 / 7.0)).abs() < 1e-12);
        assert_eq!(s.x, vec![(2.0, 1.0)]);
        assert_eq!(s.x_prime, vec![(7.0, 1.0)]);
    }

    #[test]
    fn duality_with_best_approximation() {
        let v = primal_value(3, 1.0, 10.0, 2000).unwrap();
        let e = best_inv_approx(3, 1.0, 10.0).unwrap().error;
        assert!((v - 2.0 * e).abs() <= 1e-3 * 2.0 * e, "{v} vs {}", 2.0 * e);
    }

    #[test]
    fn grid_too_small_is_rejected() {
        assert!(matches!(
            primal_value(3, 1.0, 10.0, 4),
            Err(Error::Precondition(_))
        ));
        assert!(primal_value(3, 1.0, 10.0, 5).is_ok());
    }
}
