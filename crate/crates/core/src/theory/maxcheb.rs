//! Maximum of `f(x) = e^{-beta x} T_L(x)` over `x >= 1`.
//!
//! With `x = cosh y`, `f` decreases exactly where `g(y) = tanh(L y) / sinh(y) < 1/alpha`,
//! `alpha = L / beta`. `g` falls strictly from `g(0) = L` to 0, so the maximizer is the
//! root of `g(y) = 1/alpha`, or `x = 1` when `L <= 1/alpha`.

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MaxExpCheby {
    pub x_star: f64,
    pub value: f64,
    /// `ln value`, finite even when `value` overflows.
    pub ln_value: f64,
    /// `alpha tanh(L y*) - sinh(y*)` at `y* = arccosh x*`.
    pub residual: f64,
}

// ln T_L(cosh y) = L y + ln((1 + e^{-2 L y}) / 2)
fn ln_cheb_cosh(degree: f64, y: f64) -> f64 {
    degree * y + (0.5 * (1.0 + (-2.0 * degree * y).exp())).ln()
}

pub fn max_exp_cheby(beta: f64, degree: usize) -> Result<MaxExpCheby> {
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::param(format!("beta = {beta} must be positive")));
    }
    if degree == 0 {
        return Err(Error::param("L must be at least 1"));
    }
    let l = degree as f64;
    let alpha = l / beta;
    let stationarity = |y: f64| alpha * (l * y).tanh() - y.sinh();
    let y_star = if l <= 1.0 / alpha {
        0.0
    } else {
        // stationarity > 0 below the root; sinh(y) >= alpha brackets it from above
        let (mut lo, mut hi) = (0.0f64, alpha.asinh());
        for _ in 0..2000 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if stationarity(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        // pick the endpoint with the smaller residual
        if stationarity(lo).abs() <= stationarity(hi).abs() {
            lo
        } else {
            hi
        }
    };
    let x_star = y_star.cosh();
    let ln_value = -beta * x_star + ln_cheb_cosh(l, y_star);
    Ok(MaxExpCheby {
        x_star,
        value: ln_value.exp(),
        ln_value,
        residual: stationarity(y_star),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chebyshev::cheb_eval;

    #[test]
    fn grid_oracle() {
        let (beta, l) = (3.0, 6);
        let m = max_exp_cheby(beta, l).unwrap();
        let f = |x: f64| (-beta * x).exp() * cheb_eval(l, x);
        let grid_max = (0..=1_000_000)
            .map(|i| f(1.0 + 49.0 * i as f64 / 1e6))
            .fold(f64::NEG_INFINITY, f64::max);
        assert!((m.value - grid_max).abs() <= 1e-8 * grid_max, "{} vs {grid_max}", m.value);
        assert!(m.value >= grid_max);
        assert!(m.residual.abs() < 1e-10);
    }

    #[test]
    fn monotone_case_peaks_at_one() {
        // L^2 <= beta: f is decreasing on [1, inf)
        let m = max_exp_cheby(20.0, 3).unwrap();
        assert_eq!(m.x_star, 1.0);
        assert!((m.value - (-20.0f64).exp()).abs() < 1e-20);
    }

    #[test]
    fn small_beta_pushes_the_peak_out() {
        let mut prev = 0.0;
        for beta in [1.0, 0.1, 0.01, 0.001] {
            let m = max_exp_cheby(beta, 4).unwrap();
            assert!(m.x_star > prev);
            assert!(m.residual.abs() < 1e-10 * (4.0 / beta));
            prev = m.x_star;
        }
        assert!(max_exp_cheby(1e-3, 4).unwrap().ln_value > 10.0);
    }

    #[test]
    fn large_degree_trend() {
        let alpha: f64 = 1.5;
        let l = 200;
        let m = max_exp_cheby(l as f64 / alpha, l).unwrap();
        let limit = (alpha + (alpha * alpha + 1.0).sqrt()) / (1.0 + 1.0 / (alpha * alpha)).sqrt().exp();
        let root = (m.ln_value / l as f64).exp();
        assert!((root / limit - 1.0).abs() < 0.05, "{root} vs {limit}");
    }

    #[test]
    fn rejects_bad_input() {
        assert!(max_exp_cheby(0.0, 3).is_err());
        assert!(max_exp_cheby(1.0, 0).is_err());
    }
}
