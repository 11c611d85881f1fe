//! Best uniform approximation of `1/x` on `[a, b]`.
//!
//! The Remez exchange keeps `degree + 2` reference points, solves for the polynomial
//! that levels the residual on them, then moves each point to the extremum of the
//! residual between its neighbouring sign changes. Polynomials are held in the
//! Chebyshev basis of `[a, b]`, i.e. in `t = (2x - a - b) / (b - a)`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::theory::dd::Dd;

const MAX_ITERATIONS: usize = 100;
const SAMPLES_PER_PIECE: usize = 48;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ApproxResult {
    pub degree: usize,
    pub interval: (f64, f64),
    /// Coefficients of `T_0(t), ..., T_degree(t)` with `t = (2x - a - b) / (b - a)`.
    pub coeffs: Vec<f64>,
    #[serde(skip)]
    coeffs_dd: Vec<Dd>,
    /// `E_degree(1/x, [a, b])`, the maximum of `|1/x - p(x)|`.
    pub error: f64,
    /// The `degree + 2` points where the residual alternates between `+error` and `-error`.
    pub extrema: Vec<f64>,
    pub iterations: usize,
}

impl ApproxResult {
    pub fn eval(&self, x: f64) -> f64 {
        clenshaw(&self.coeffs_dd, to_unit(x, self.interval)).to_f64()
    }

    /// `1/x - p(x)`, evaluated in double-word arithmetic.
    pub fn residual(&self, x: f64) -> f64 {
        residual_dd(&self.coeffs_dd, x, self.interval)
    }
}

pub(crate) fn to_unit(x: f64, (a, b): (f64, f64)) -> Dd {
    (Dd::new(x).mul_f64(2.0) - Dd::new(a) - Dd::new(b)) / (Dd::new(b) - Dd::new(a))
}

pub(crate) fn clenshaw(c: &[Dd], t: Dd) -> Dd {
    let (mut b1, mut b2) = (Dd::ZERO, Dd::ZERO);
    let two_t = t.mul_f64(2.0);
    for &ck in c.iter().skip(1).rev() {
        let b0 = two_t * b1 - b2 + ck;
        b2 = b1;
        b1 = b0;
    }
    t * b1 - b2 + c[0]
}

pub(crate) fn residual_dd(c: &[Dd], x: f64, interval: (f64, f64)) -> f64 {
    (Dd::new(x).recip() - clenshaw(c, to_unit(x, interval))).to_f64()
}

/// `E_{L-1}(1/x, [a, b]) = (1 + s)^2 / (2a) * ((1 - s) / (1 + s))^L` with `s = sqrt(a / b)`.
pub fn closed_form_error<T: Scalar>(degree_plus_one: usize, a: T, b: T) -> Result<T> {
    if !(a > T::zero() && b > a && b.is_finite()) {
        return Err(Error::param(format!("need 0 < a < b, got [{a}, {b}]")));
    }
    if degree_plus_one == 0 {
        return Err(Error::param("L must be at least 1"));
    }
    let one = T::one();
    let s = (a / b).sqrt();
    let ratio = (one - s) / (one + s);
    let l = T::from_usize(degree_plus_one).unwrap();
    Ok((one + s).powi(2) / (a + a) * (l * ratio.ln()).exp())
}

/// Solves the square system by Gaussian elimination with partial pivoting.
pub(crate) fn solve_dense(mut m: Vec<Vec<Dd>>, mut rhs: Vec<Dd>) -> Result<Vec<Dd>> {
    let n = rhs.len();
    let scale = m
        .iter()
        .flat_map(|row| row.iter())
        .fold(0.0f64, |acc, v| acc.max(v.hi.abs()));
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| m[i][col].hi.abs().total_cmp(&m[j][col].hi.abs()))
            .unwrap();
        let p = m[pivot][col].hi.abs();
        if !(p > 1e-14 * scale) {
            return Err(Error::Singular {
                condition: if p > 0.0 { scale / p } else { f64::INFINITY },
            });
        }
        m.swap(col, pivot);
        rhs.swap(col, pivot);
        for row in col + 1..n {
            let f = m[row][col] / m[col][col];
            if f.hi != 0.0 {
                for c in col..n {
                    let v = f * m[col][c];
                    m[row][c] = m[row][c] - v;
                }
                let v = f * rhs[col];
                rhs[row] = rhs[row] - v;
            }
        }
    }
    let mut x = vec![Dd::ZERO; n];
    for row in (0..n).rev() {
        let mut s = rhs[row];
        for c in row + 1..n {
            s = s - m[row][c] * x[c];
        }
        x[row] = s / m[row][row];
    }
    Ok(x)
}

/// Chebyshev-basis coefficients of the degree-`degree` interpolant of `1/x` at the
/// Chebyshev points of `[a, b]`.
pub(crate) fn interpolate_inverse(degree: usize, (a, b): (f64, f64)) -> Result<Vec<Dd>> {
    let n = degree + 1;
    let nodes: Vec<f64> = (0..n)
        .map(|k| {
            let theta = std::f64::consts::PI * (2 * k + 1) as f64 / (2 * n) as f64;
            0.5 * (a + b) - 0.5 * (b - a) * theta.cos()
        })
        .collect();
    let rows = nodes
        .iter()
        .map(|&x| {
            let t = to_unit(x, (a, b));
            let mut row = Vec::with_capacity(n);
            let (mut prev, mut cur) = (Dd::ONE, t);
            row.push(Dd::ONE);
            for _ in 1..n {
                row.push(cur);
                let next = t.mul_f64(2.0) * cur - prev;
                prev = cur;
                cur = next;
            }
            row
        })
        .collect();
    solve_dense(rows, nodes.iter().map(|&x| Dd::new(x).recip()).collect())
}

// Levelled polynomial on the reference: sum_j c_j T_j(t_i) + (-1)^i E = 1/x_i.
fn level(reference: &[f64], interval: (f64, f64)) -> Result<(Vec<Dd>, f64)> {
    let n = reference.len();
    let rows = reference
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let t = to_unit(x, interval);
            let mut row = Vec::with_capacity(n);
            let (mut prev, mut cur) = (Dd::ONE, t);
            row.push(Dd::ONE);
            for _ in 1..n - 1 {
                row.push(cur);
                let next = t.mul_f64(2.0) * cur - prev;
                prev = cur;
                cur = next;
            }
            row.push(Dd::new(if i % 2 == 0 { 1.0 } else { -1.0 }));
            row
        })
        .collect();
    let rhs = reference.iter().map(|&x| Dd::new(x).recip()).collect();
    let mut sol = solve_dense(rows, rhs)?;
    let e = sol.pop().unwrap().to_f64();
    Ok((sol, e))
}

fn bisect_root(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm > 0.0) == (flo > 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

// Maximizes f on [lo, hi]: coarse sampling, then golden section around the best sample.
fn maximize(f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> (f64, f64) {
    let samples: Vec<(f64, f64)> = (0..=SAMPLES_PER_PIECE)
        .map(|i| {
            let x = if i == SAMPLES_PER_PIECE {
                hi
            } else {
                lo + (hi - lo) * i as f64 / SAMPLES_PER_PIECE as f64
            };
            (x, f(x))
        })
        .collect();
    let best = (0..samples.len())
        .max_by(|&i, &j| samples[i].1.total_cmp(&samples[j].1))
        .unwrap();
    let mut left = samples[best.saturating_sub(1)].0;
    let mut right = samples[(best + 1).min(SAMPLES_PER_PIECE)].0;
    let mut top = samples[best];
    let invphi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = right - invphi * (right - left);
    let mut x2 = left + invphi * (right - left);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..120 {
        if right - left <= 4.0 * f64::EPSILON * right.abs().max(left.abs()) {
            break;
        }
        if f1 < f2 {
            left = x1;
            x1 = x2;
            f1 = f2;
            x2 = left + invphi * (right - left);
            f2 = f(x2);
        } else {
            right = x2;
            x2 = x1;
            f2 = f1;
            x1 = right - invphi * (right - left);
            f1 = f(x1);
        }
    }
    for cand in [(x1, f1), (x2, f2)] {
        if cand.1 > top.1 {
            top = cand;
        }
    }
    top
}

/// Best uniform approximation of `1/x` on `[a, b]` by polynomials of degree `degree`.
pub fn best_inv_approx(degree: usize, a: f64, b: f64) -> Result<ApproxResult> {
    if !(a > 0.0 && b > a && b.is_finite()) {
        return Err(Error::param(format!("need 0 < a < b, got [{a}, {b}]")));
    }
    let interval = (a, b);
    let m = degree + 1;
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut reference: Vec<f64> = (0..=m)
        .map(|i| {
            if i == 0 {
                a
            } else if i == m {
                b
            } else {
                mid - half * (std::f64::consts::PI * i as f64 / m as f64).cos()
            }
        })
        .collect();
    let mut last_spread = f64::INFINITY;
    for iteration in 1..=MAX_ITERATIONS {
        let (coeffs, e) = level(&reference, interval)?;
        let residual = |x: f64| residual_dd(&coeffs, x, interval);
        let sign0 = if e >= 0.0 { 1.0 } else { -1.0 };
        // the residual changes sign between neighbouring reference points
        let mut cuts = vec![a];
        for w in reference.windows(2) {
            cuts.push(bisect_root(residual, w[0], w[1]));
        }
        cuts.push(b);
        let mut next = Vec::with_capacity(m + 1);
        let mut values = Vec::with_capacity(m + 1);
        for i in 0..=m {
            let s = if i % 2 == 0 { sign0 } else { -sign0 };
            let (x, v) = maximize(|x| s * residual(x), cuts[i], cuts[i + 1]);
            next.push(x.clamp(a, b));
            values.push(v);
        }
        let max_dev = values.iter().copied().fold(0.0f64, f64::max);
        let min_dev = values.iter().copied().fold(f64::INFINITY, f64::min);
        let spread = (max_dev - min_dev) / max_dev;
        if !(min_dev > 0.0) && iteration > 1 {
            return Err(Error::NonConvergence {
                iterations: iteration,
                detail: format!("residual lost alternation: deviations {values:?}"),
            });
        }
        reference = next;
        // the residual is accurate to about eps^2 / a, the extrema positions to eps
        let target = 1e-13;
        if spread <= target || (spread <= 1e3 * target && spread >= last_spread) {
            return Ok(ApproxResult {
                degree,
                interval,
                coeffs: coeffs.iter().map(|c| c.to_f64()).collect(),
                coeffs_dd: coeffs,
                error: max_dev,
                extrema: reference,
                iterations: iteration,
            });
        }
        last_spread = spread;
    }
    Err(Error::NonConvergence {
        iterations: MAX_ITERATIONS,
        detail: format!("relative spread of the residual extrema stayed at {last_spread:e}"),
    })
}
