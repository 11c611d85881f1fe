//! Moment-matched prior pairs.
//!
//! The best degree-`(L-1)` approximation of `1/x` on `[1 + nu, lambda]` equioscillates
//! at `L + 1` points `x_0 < ... < x_L`. Up to scale, the only signed measure on those
//! points annihilating all polynomials of degree `< L` has weights
//! `mu_i = 1 / prod_{j != i} (x_i - x_j)`; they alternate in sign. Splitting `mu` into
//! positive and negative parts gives `X` and `X'` with equal moments `0..L-1` and
//! `E[1/X] - E[1/X'] = 2 E_{L-1}`. Then
//!
//! ```text
//! P_U(du) = (1 - E[1/X]) delta_0 + u^{-1} P_X(du)
//! ```
//!
//! and likewise for `U'`, so `E[U^j] = E[X^{j-1}]` and
//! `P[U' = 0] - P[U = 0] = E[1/X] - E[1/X']`.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::rational_to_f64;
use crate::theory::remez::best_inv_approx;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PriorPair {
    /// Atoms of `U`, starting with 0.
    pub atoms_u: Vec<f64>,
    pub weights_u: Vec<f64>,
    /// Atoms of `U'`, starting with 0.
    pub atoms_u_prime: Vec<f64>,
    pub weights_u_prime: Vec<f64>,
    #[serde(rename = "L")]
    pub degree: usize,
    pub nu: f64,
    pub lambda: f64,
    /// `P[U' = 0] - P[U = 0]`.
    pub gap: f64,
    /// The best approximation error `E_{L-1}(1/x, [1 + nu, lambda])`.
    pub approx_error: f64,
}

impl PriorPair {
    pub fn u(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.atoms_u.iter().copied().zip(self.weights_u.iter().copied())
    }

    pub fn u_prime(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.atoms_u_prime
            .iter()
            .copied()
            .zip(self.weights_u_prime.iter().copied())
    }

    /// `(E[U^j], E[U'^j])`.
    pub fn moment(&self, j: i32) -> (f64, f64) {
        let m = |it: &mut dyn Iterator<Item = (f64, f64)>| it.map(|(u, w)| w * u.powi(j)).sum::<f64>();
        (m(&mut self.u()), m(&mut self.u_prime()))
    }
}

// Null vector of the moment system, exactly for the given (rounded) points.
fn annihilating_weights(points: &[f64]) -> Result<Vec<f64>> {
    let exact: Vec<BigRational> = points
        .iter()
        .map(|&x| BigRational::from_float(x).ok_or_else(|| Error::Internal("non-finite extremum".into())))
        .collect::<Result<_>>()?;
    let mut raw = Vec::with_capacity(points.len());
    for (i, xi) in exact.iter().enumerate() {
        let mut prod = BigRational::one();
        for (j, xj) in exact.iter().enumerate() {
            if i != j {
                prod *= xi - xj;
            }
        }
        if prod.is_zero() {
            return Err(Error::Singular {
                condition: f64::INFINITY,
            });
        }
        raw.push(prod.recip());
    }
    let total = raw.iter().fold(BigRational::zero(), |acc, w| acc + w.abs());
    let half = total / BigRational::from_integer(2.into());
    let weights: Vec<f64> = raw.iter().map(|w| rational_to_f64(&(w / &half))).collect();
    let (lo, hi) = weights.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), w| {
        (lo.min(w.abs()), hi.max(w.abs()))
    });
    if !(lo > 0.0) {
        return Err(Error::Singular { condition: hi / lo });
    }
    Ok(weights)
}

/// Builds `(U, U')` on `{0} u [1 + nu, lambda]` with `E[U] = E[U'] = 1`, matching
/// moments `1..=L`, and `P[U' = 0] - P[U = 0] = 2 E_{L-1}(1/x, [1 + nu, lambda])`.
pub fn construct_prior_pair(degree: usize, nu: f64, lambda: f64) -> Result<PriorPair> {
    if degree == 0 {
        return Err(Error::param("L must be at least 1"));
    }
    if !(nu >= 0.0) || !nu.is_finite() {
        return Err(Error::param(format!("nu = {nu} must be nonnegative")));
    }
    if !(lambda > 1.0 + nu) || !lambda.is_finite() {
        return Err(Error::param(format!("lambda = {lambda} must exceed 1 + nu = {}", 1.0 + nu)));
    }
    let approx = best_inv_approx(degree - 1, 1.0 + nu, lambda)?;
    let points = &approx.extrema;
    let mut mu = annihilating_weights(points)?;
    // put the positive part where the residual is positive
    if mu[0] * approx.residual(points[0]) < 0.0 {
        mu.iter_mut().for_each(|w| *w = -*w);
    }
    let build = |positive: bool| {
        let mut atoms = vec![0.0];
        let mut weights = vec![0.0];
        let mut inv_mean = 0.0;
        for (&x, &w) in points.iter().zip(&mu) {
            if (w > 0.0) == positive {
                let p = w.abs();
                atoms.push(x);
                weights.push(p / x);
                inv_mean += p / x;
            }
        }
        weights[0] = 1.0 - inv_mean;
        (atoms, weights)
    };
    let (atoms_u, weights_u) = build(true);
    let (atoms_u_prime, weights_u_prime) = build(false);
    if weights_u[0] < -1e-12 || weights_u_prime[0] < -1e-12 {
        return Err(Error::Internal("prior pair has a negative mass at zero".into()));
    }
    let gap = weights_u_prime[0] - weights_u[0];
    Ok(PriorPair {
        atoms_u,
        weights_u,
        atoms_u_prime,
        weights_u_prime,
        degree,
        nu,
        lambda,
        gap,
        approx_error: approx.error,
    })
}
