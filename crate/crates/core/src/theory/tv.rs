//! Total variation between Poisson mixtures and the Le Cam certificate.
//!
//! For priors `U`, `U'` and a scale `s` (playing the role of `n / k`), the mixtures are
//! `E[Poi(s U)]` and `E[Poi(s U')]`. Their distance is summed exactly up to a cutoff;
//! the mass beyond the cutoff is bounded by the Chernoff bound
//! `P[Poi(m) > c] <= e^{-m} (e m / (c + 1))^{c + 1}` for `c + 1 > m`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::theory::priors::{construct_prior_pair, PriorPair};

/// Largest tail mass accepted by [`tv_exact`].
pub const TAIL_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TvEstimate {
    /// Distance restricted to counts `0..=cutoff`.
    pub lower: f64,
    /// `lower` plus the certified tail bound.
    pub upper: f64,
    pub tail_bound: f64,
    pub cutoff: u64,
}

/// Chernoff bound on `P[Poi(mean) > cutoff]`.
pub fn poisson_tail_bound(mean: f64, cutoff: u64) -> f64 {
    if mean <= 0.0 {
        return 0.0;
    }
    let c = cutoff as f64 + 1.0;
    if c <= mean {
        return 1.0;
    }
    (-mean + c * (1.0 + (mean / c).ln())).exp().min(1.0)
}

/// Smallest cutoff whose tail bound at `max_mean` is below `tolerance`.
pub fn cutoff_for(max_mean: f64, tolerance: f64) -> u64 {
    let mut c = max_mean.ceil() as u64;
    while poisson_tail_bound(max_mean, c) >= tolerance {
        c = c + 1 + c / 16;
    }
    // walk back to the smallest admissible value
    while c > 0 && poisson_tail_bound(max_mean, c - 1) < tolerance {
        c -= 1;
    }
    c
}

fn mixture_pmf(prior: &[(f64, f64)], scale: f64, ln_fact: &[f64]) -> Vec<f64> {
    let cutoff = ln_fact.len() - 1;
    let mut pmf = vec![0.0; cutoff + 1];
    for &(u, w) in prior {
        let m = scale * u;
        if m == 0.0 {
            pmf[0] += w;
            continue;
        }
        let ln_m = m.ln();
        for (j, p) in pmf.iter_mut().enumerate() {
            *p += w * (-m + j as f64 * ln_m - ln_fact[j]).exp();
        }
    }
    pmf
}

/// TV between `E[Poi(scale U)]` and `E[Poi(scale U')]` for finite priors given as
/// `(atom, weight)` pairs.
pub fn tv_exact_mixtures(
    u: &[(f64, f64)],
    u_prime: &[(f64, f64)],
    scale: f64,
    cutoff: u64,
) -> Result<TvEstimate> {
    if !(scale >= 0.0) || !scale.is_finite() {
        return Err(Error::param(format!("scale = {scale} must be nonnegative")));
    }
    if u.iter().chain(u_prime).any(|&(a, w)| !(a >= 0.0) || !(w >= -1e-15) || !a.is_finite()) {
        return Err(Error::param("priors need nonnegative atoms and weights"));
    }
    let max_mean = u
        .iter()
        .chain(u_prime)
        .map(|&(a, _)| scale * a)
        .fold(0.0f64, f64::max);
    let tail_bound = poisson_tail_bound(max_mean, cutoff);
    if tail_bound >= TAIL_TOLERANCE {
        return Err(Error::Precision(format!(
            "cutoff {cutoff} leaves a tail bound of {tail_bound:e} at mean {max_mean}; need at least {}",
            cutoff_for(max_mean, TAIL_TOLERANCE)
        )));
    }
    let len = cutoff as usize + 1;
    let mut ln_fact = Vec::with_capacity(len);
    let mut acc = 0.0;
    for j in 0..len {
        if j > 0 {
            acc += (j as f64).ln();
        }
        ln_fact.push(acc);
    }
    let p = mixture_pmf(u, scale, &ln_fact);
    let q = mixture_pmf(u_prime, scale, &ln_fact);
    let lower = 0.5 * p.iter().zip(&q).map(|(a, b)| (a - b).abs()).sum::<f64>();
    Ok(TvEstimate {
        lower,
        upper: lower + tail_bound,
        tail_bound,
        cutoff,
    })
}

/// Largest `scale * lambda` at which [`tv_exact`] sums the moment series.
pub const SERIES_LIMIT: f64 = 1.0;

/// TV between the Poisson mixtures of a prior pair at `scale`.
///
/// For `scale * lambda <= SERIES_LIMIT` the pmf differences come from the moment
/// expansion `p_j - q_j = x^j / j! * sum_m (-x)^m / m! * N_{j+m}`, with `x = scale *
/// lambda` and `N_t` the signed moments of `U - U'` in units of `lambda`. The first `L`
/// of those vanish by construction and are taken as exactly zero, so tiny distances
/// are not swamped by cancellation between two pmfs close to each other. The bound on
/// the truncated series is added to `upper`.
pub fn tv_exact(pp: &PriorPair, scale: f64, cutoff: u64) -> Result<TvEstimate> {
    let u: Vec<_> = pp.u().collect();
    let v: Vec<_> = pp.u_prime().collect();
    let x = scale * pp.lambda;
    if !(x > 0.0) || x > SERIES_LIMIT {
        return tv_exact_mixtures(&u, &v, scale, cutoff);
    }
    let tail_bound = poisson_tail_bound(x, cutoff);
    if tail_bound >= TAIL_TOLERANCE {
        return Err(Error::Precision(format!(
            "cutoff {cutoff} leaves a tail bound of {tail_bound:e} at mean {x}; need at least {}",
            cutoff_for(x, TAIL_TOLERANCE)
        )));
    }
    // terms x^m / m! with x <= 1 fall below 1e-300 well before m = 180
    let terms = 180usize;
    let cutoff = cutoff as usize;
    let signed: Vec<(f64, f64)> = u
        .iter()
        .map(|&(a, w)| (a / pp.lambda, w))
        .chain(v.iter().map(|&(a, w)| (a / pp.lambda, -w)))
        .collect();
    let total: f64 = signed.iter().map(|p| p.1.abs()).sum();
    let moments: Vec<f64> = (0..=cutoff + terms)
        .map(|t| {
            if t <= pp.degree {
                0.0
            } else {
                signed.iter().map(|&(a, w)| w * a.powi(t as i32)).sum()
            }
        })
        .collect();
    let mut coef = vec![1.0; terms + 1];
    for m in 1..=terms {
        coef[m] = coef[m - 1] * x / m as f64;
    }
    // |N_t| <= total, so the dropped terms are at most total * x^{M+1}/(M+1)! * e^x
    let remainder = total * coef[terms] * x / (terms as f64 + 1.0) * x.exp();
    let mut lower = 0.0;
    let mut truncation = 0.0;
    let mut lead = 1.0;
    for j in 0..=cutoff {
        if j > 0 {
            lead *= x / j as f64;
        }
        let mut acc = 0.0;
        for (m, c) in coef.iter().enumerate() {
            let term = c * moments[j + m];
            acc += if m % 2 == 0 { term } else { -term };
        }
        lower += 0.5 * (lead * acc).abs();
        truncation += 0.5 * lead * remainder;
    }
    Ok(TvEstimate {
        lower,
        upper: lower + truncation + tail_bound,
        tail_bound,
        cutoff: cutoff as u64,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TvBound {
    /// `(Lambda/2)^{L+1} / (L+1)! * (2 + 2^{Lambda/2 - L} + 2^{Lambda/(2 ln 2) - L})`.
    pub full: f64,
    /// `(e Lambda / (2L))^L`.
    pub simplified: f64,
    /// The smaller of the two.
    pub value: f64,
}

/// Bound on the TV between Poisson mixtures of two priors on `[0, Lambda]` whose
/// first `L` moments agree.
pub fn tv_bound(lambda: f64, degree: usize) -> Result<TvBound> {
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(Error::param(format!("Lambda = {lambda} must be positive")));
    }
    if degree == 0 {
        return Err(Error::param("L must be at least 1"));
    }
    let l = degree as f64;
    let ln_fact: f64 = (2..=degree + 1).map(|i| (i as f64).ln()).sum();
    let ln2 = std::f64::consts::LN_2;
    let bracket = 2.0 + (ln2 * (lambda / 2.0 - l)).exp() + (lambda / 2.0 - ln2 * l).exp();
    let full = ((l + 1.0) * (lambda / 2.0).ln() - ln_fact + bracket.ln()).exp();
    let simplified = (l * (std::f64::consts::E * lambda / (2.0 * l)).ln()).exp();
    Ok(TvBound {
        full,
        simplified,
        value: full.min(simplified),
    })
}

/// Parameters of one Le Cam two-point certificate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CertificateParams {
    pub k: f64,
    pub n: f64,
    #[serde(rename = "L")]
    pub degree: usize,
    pub lambda: f64,
    pub nu: f64,
    pub alpha: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Certificate {
    pub params: CertificateParams,
    /// `lhs <= 0.6`.
    pub valid: bool,
    pub lhs: f64,
    /// `[2 lambda / (k nu^2), 2 / (k alpha^2 d^2), k (e n lambda / (2 k L))^L]`.
    pub terms: [f64; 3],
    /// `d = P[U' = 0] - P[U = 0]` of the constructed prior pair.
    pub gap: f64,
    /// `(1 - 2 alpha) d / 2`.
    pub implied_epsilon: f64,
}

/// Threshold on the left-hand side of the certificate inequality.
pub const CERTIFICATE_THRESHOLD: f64 = 0.6;

/// Evaluates `2 lambda/(k nu^2) + 2/(k alpha^2 d^2) + k (e n lambda/(2 k L))^L <= 0.6`.
/// When it holds, the Poissonized sample complexity at accuracy `implied_epsilon`
/// is at least `n`.
pub fn lecam_certificate(params: CertificateParams) -> Result<Certificate> {
    let CertificateParams {
        k,
        n,
        degree,
        lambda,
        nu,
        alpha,
    } = params;
    if !(alpha > 0.0 && alpha < 0.5) {
        return Err(Error::Precondition(format!("alpha = {alpha} must lie in (0, 1/2)")));
    }
    if !(k > 1.0) || !(n >= 0.0) {
        return Err(Error::param("need k > 1 and n >= 0"));
    }
    let pp = construct_prior_pair(degree, nu, lambda)?;
    let d = pp.gap;
    let l = degree as f64;
    let t1 = 2.0 * lambda / (k * nu * nu);
    let t2 = 2.0 / (k * alpha * alpha * d * d);
    let t3 = if n == 0.0 {
        0.0
    } else {
        (k.ln() + l * (std::f64::consts::E * n * lambda / (2.0 * k * l)).ln()).exp()
    };
    let lhs = t1 + t2 + t3;
    Ok(Certificate {
        params,
        valid: lhs <= CERTIFICATE_THRESHOLD,
        lhs,
        terms: [t1, t2, t3],
        gap: d,
        implied_epsilon: (1.0 - 2.0 * alpha) * d / 2.0,
    })
}

/// Parameter choice for accuracy `epsilon`: `L = floor(c0 ln k)`,
/// `lambda = (gamma ln k / ln(1/(2 epsilon)))^2`, `n = C k / ln k * ln^2(1/(2 epsilon))`,
/// `alpha = k^{-1/3}`, `nu = sqrt(sqrt(lambda / k) (1 - 2 epsilon))`.
pub fn certificate_recipe(k: f64, epsilon: f64, c0: f64, gamma: f64, c: f64) -> Result<CertificateParams> {
    if !(epsilon > 0.0 && epsilon < 0.5) {
        return Err(Error::Precondition(format!("epsilon = {epsilon} must lie in (0, 1/2)")));
    }
    if !(k > 1.0) || !(c0 > 0.0) || !(gamma > 0.0) || !(c > 0.0) {
        return Err(Error::param("k must exceed 1 and c0, gamma, C must be positive"));
    }
    let ln_k = k.ln();
    let ln_eps = (1.0 / (2.0 * epsilon)).ln();
    let degree = (c0 * ln_k).floor() as usize;
    if degree == 0 {
        return Err(Error::DegenerateDegree { k, c0 });
    }
    let lambda = (gamma * ln_k / ln_eps).powi(2);
    Ok(CertificateParams {
        k,
        n: c * k / ln_k * ln_eps * ln_eps,
        degree,
        lambda,
        nu: ((lambda / k).sqrt() * (1.0 - 2.0 * epsilon)).sqrt(),
        alpha: k.powf(-1.0 / 3.0),
    })
}
