//! Numerical checks of the minimax lower-bound machinery.
//!
//! - [`remez`]: best uniform polynomial approximation of `1/x` on `[a, b]` by Remez
//!   exchange, and the closed form of its error.
//! - [`lp`]: the moment-matching linear program whose value is twice that error.
//! - [`priors`]: moment-matched prior pairs `(U, U')` built from the equioscillation
//!   points of the best approximation.
//! - [`tv`]: total variation between Poisson mixtures, exact and bounded, and the
//!   Le Cam certificate.
//! - [`maxcheb`]: the maximum of `e^{-beta x} T_L(x)` over `x >= 1`.
//!
//! Everything here runs in `f64`; the closed forms are generic over [`Scalar`].

mod dd;
pub mod lp;
pub mod maxcheb;
pub mod priors;
pub mod remez;
pub mod tv;

pub use lp::{primal_solution, primal_value, PrimalSolution};
pub use maxcheb::{max_exp_cheby, MaxExpCheby};
pub use priors::{construct_prior_pair, PriorPair};
pub use remez::{best_inv_approx, closed_form_error, ApproxResult};
pub use tv::{
    certificate_recipe, lecam_certificate, tv_bound, tv_exact, tv_exact_mixtures, Certificate,
    CertificateParams, TvBound, TvEstimate,
};

use crate::scalar::Scalar;

/// `max(sqrt(n ln k / k), n / k, 1)`, the growth of the minimax risk up to constants.
pub fn rate_envelope<T: Scalar>(k: T, n: T) -> T {
    let ratio = n / k;
    (ratio * k.ln()).sqrt().max(ratio).max(T::one())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rate_envelope_examples() {
        assert_eq!(rate_envelope(1000.0_f64, 0.0), 1.0);
        let k = 1e5_f64;
        let v = rate_envelope(k, k * k.ln());
        assert!((v - k.ln()).abs() < 1e-9);
        for k in [3.0_f64, 10.0, 1e6] {
            assert!((rate_envelope(k, k) - k.ln().sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn rate_envelope_is_monotone() {
        let mut prev = 0.0;
        for i in 0..200 {
            let v = rate_envelope(1e4_f64, i as f64 * 500.0);
            assert!(v >= prev);
            prev = v;
        }
        // for fixed n >= k > e both leading terms shrink as k grows
        for n in [1e4_f64, 1e5, 1e6] {
            let mut prev = f64::INFINITY;
            for k in (2..=50).map(|i| i as f64 * 100.0).filter(|&k| n >= k) {
                let v = rate_envelope(k, n);
                assert!(v <= prev + 1e-12);
                prev = v;
            }
        }
    }
}
