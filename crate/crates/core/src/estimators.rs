//! Support size estimators, all functions of a [`Fingerprint`].
//!
//! Every estimator here is linear in the fingerprint except Good-Turing and Chao-Lee,
//! which rescale by the estimated sample coverage `C = 1 - h_1 / n`.
//!
//! Chao-Lee (1992), with `D` observed types and `S_2 = sum_j j (j - 1) h_j`:
//!
//! ```text
//! gamma^2  = max(D / C * S_2 / (n (n - 1)) - 1, 0)
//! CL1      = D / C + n (1 - C) / C * gamma^2
//! gamma~^2 = max(gamma^2 * (1 + n (1 - C) S_2 / (n (n - 1) C)), 0)
//! CL2      = D / C + n (1 - C) / C * gamma~^2
//! ```

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::chebyshev::{g_table, CoefficientTable};
use crate::error::{Error, Result};
use crate::ingest::Fingerprint;
use crate::scalar::Scalar;

/// Tuning of the Chebyshev estimator: `L = floor(c0 ln k)`, `r = c1 ln k / n`,
/// `l = 1/k`. `degree` overrides `L` when set. `et_t` and `et_terms` are the
/// Efron-Thisted extrapolation ratio and number of terms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimatorConfig<T> {
    pub c0: T,
    pub c1: T,
    pub degree: Option<usize>,
    pub et_t: T,
    pub et_terms: usize,
}

impl<T: Scalar> Default for EstimatorConfig<T> {
    fn default() -> Self {
        Self {
            c0: T::from_f64_lossy(0.45),
            c1: T::from_f64_lossy(0.5),
            degree: None,
            et_t: T::one(),
            et_terms: 10,
        }
    }
}

impl<T: Scalar> EstimatorConfig<T> {
    /// `c0 = 0.558`, `c1 = 0.5`, the constants tuned for the iid risk bound.
    pub fn rate_optimal() -> Self {
        Self {
            c0: T::from_f64_lossy(0.558),
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EstimatorKind {
    #[serde(rename = "wy")]
    Chebyshev,
    #[serde(rename = "plugin")]
    PlugIn,
    #[serde(rename = "gt")]
    GoodTuring,
    #[serde(rename = "cl1")]
    ChaoLee1,
    #[serde(rename = "cl2")]
    ChaoLee2,
    #[serde(rename = "et")]
    EfronThisted,
    #[serde(rename = "gtoulmin")]
    GoodToulmin,
}

impl EstimatorKind {
    pub const ALL: [EstimatorKind; 7] = [
        EstimatorKind::Chebyshev,
        EstimatorKind::PlugIn,
        EstimatorKind::GoodTuring,
        EstimatorKind::ChaoLee1,
        EstimatorKind::ChaoLee2,
        EstimatorKind::EfronThisted,
        EstimatorKind::GoodToulmin,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EstimatorKind::Chebyshev => "wy",
            EstimatorKind::PlugIn => "plugin",
            EstimatorKind::GoodTuring => "gt",
            EstimatorKind::ChaoLee1 => "cl1",
            EstimatorKind::ChaoLee2 => "cl2",
            EstimatorKind::EfronThisted => "et",
            EstimatorKind::GoodToulmin => "gtoulmin",
        }
    }
}

impl fmt::Display for EstimatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EstimatorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        EstimatorKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| {
                Error::param(format!(
                    "unknown estimator \"{s}\" (expected one of wy, plugin, gt, cl1, cl2, et, gtoulmin)"
                ))
            })
    }
}

/// Degree and interval of the Chebyshev estimator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DegreeParams<T> {
    #[serde(rename = "L")]
    pub degree: usize,
    pub l: T,
    pub r: T,
}

/// Echo of the parameters an estimate was computed with.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EstimateParams<T> {
    #[serde(rename = "L")]
    pub degree: usize,
    pub l: T,
    pub r: T,
    pub n: u64,
    pub k: T,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Estimate<T> {
    pub estimator: EstimatorKind,
    pub value: T,
    pub rounded: i64,
    pub n: u64,
    pub params: Option<EstimateParams<T>>,
}

impl<T: Scalar> Estimate<T> {
    fn new(estimator: EstimatorKind, value: T, n: u64) -> Self {
        Self {
            estimator,
            value,
            rounded: round_to_i64(value),
            n,
            params: None,
        }
    }

    /// Restricts the value to `[lo, hi]` and recomputes the rounded companion.
    pub fn clamped(mut self, lo: T, hi: T) -> Self {
        self.value = self.value.max(lo).min(hi);
        self.rounded = round_to_i64(self.value);
        self
    }
}

fn round_to_i64<T: Scalar>(v: T) -> i64 {
    v.round().to_i64().unwrap_or(if v > T::zero() { i64::MAX } else { i64::MIN })
}

/// `L = floor(c0 ln k)` (natural log), `l = 1/k`, `r = c1 ln k / n`.
pub fn degree_params<T: Scalar>(k: T, n: u64, cfg: &EstimatorConfig<T>) -> Result<DegreeParams<T>> {
    if !(k >= T::from_f64_lossy(2.0)) || !k.is_finite() {
        return Err(Error::Precondition(format!("k = {k} must be at least 2")));
    }
    if n == 0 {
        return Err(Error::Precondition("n must be at least 1".into()));
    }
    if !(cfg.c0 > T::zero() && cfg.c1 > T::zero()) {
        return Err(Error::param("c0 and c1 must be positive"));
    }
    let ln_k = k.ln();
    let degree = match cfg.degree {
        Some(d) => d,
        None => (cfg.c0 * ln_k).floor().to_usize().unwrap_or(0),
    };
    if degree == 0 {
        return Err(Error::DegenerateDegree {
            k: k.to_f64().unwrap_or(f64::NAN),
            c0: cfg.c0.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(DegreeParams {
        degree,
        l: k.recip(),
        r: cfg.c1 * ln_k / T::from_u64_lossy(n),
    })
}

/// Coefficient table the Chebyshev estimator uses for `(k, n)`.
pub fn wy_table<T: Scalar>(k: T, n: u64, cfg: &EstimatorConfig<T>) -> Result<CoefficientTable<T>> {
    let p = degree_params(k, n, cfg)?;
    g_table(p.degree, p.l, p.r, n)
}

/// Chebyshev linear estimator `sum_{j<=L} g_L(j) h_j + sum_{j>L} h_j`.
pub fn wy_estimate<T: Scalar>(fp: &Fingerprint, k: T, cfg: &EstimatorConfig<T>) -> Result<Estimate<T>> {
    let table = wy_table(k, fp.n(), cfg)?;
    wy_estimate_with(fp, k, &table)
}

/// Evaluates the estimator with a precomputed table. The table's `n` is taken as the
/// sample size; under Poissonized sampling that is the nominal `n`, not the realized
/// total count.
///
/// Computed as `plug_in + sum_{j<=L} (g_L(j) - 1) h_j`, the same linear form with
/// the observed count factored out.
pub fn wy_estimate_with<T: Scalar>(
    fp: &Fingerprint,
    k: T,
    table: &CoefficientTable<T>,
) -> Result<Estimate<T>> {
    let degree = table.degree();
    // the censored tail must lie entirely above the polynomial part
    fp.distinct_above(degree as u64, "wy")?;
    let excess = table.g_minus_one();
    let mut value = T::from_u64_lossy(fp.distinct());
    for (j, hj) in fp.iter().take_while(|&(j, _)| j as usize <= degree) {
        value = value + excess[j as usize] * T::from_u64_lossy(hj);
    }
    let (l, r) = table.interval();
    let mut est = Estimate::new(EstimatorKind::Chebyshev, value, table.n());
    est.params = Some(EstimateParams {
        degree,
        l,
        r,
        n: table.n(),
        k,
    });
    Ok(est)
}

/// Runs the estimator `kind`. `k` is only used by the Chebyshev estimator.
pub fn estimate<T: Scalar>(
    kind: EstimatorKind,
    fp: &Fingerprint,
    k: T,
    cfg: &EstimatorConfig<T>,
) -> Result<Estimate<T>> {
    match kind {
        EstimatorKind::Chebyshev => wy_estimate(fp, k, cfg),
        EstimatorKind::PlugIn => Ok(plug_in(fp)),
        EstimatorKind::GoodTuring => good_turing(fp),
        EstimatorKind::ChaoLee1 => chao_lee(fp, ChaoLeeVariant::First),
        EstimatorKind::ChaoLee2 => chao_lee(fp, ChaoLeeVariant::Second),
        EstimatorKind::EfronThisted => efron_thisted(fp, cfg.et_t, cfg.et_terms),
        EstimatorKind::GoodToulmin => good_toulmin(fp, cfg.et_t),
    }
}

/// Number of distinct observed symbols.
pub fn plug_in<T: Scalar>(fp: &Fingerprint) -> Estimate<T> {
    Estimate::new(EstimatorKind::PlugIn, T::from_u64_lossy(fp.distinct()), fp.n())
}

fn coverage<T: Scalar>(fp: &Fingerprint, estimator: &'static str) -> Result<T> {
    if fp.n() == 0 {
        return Err(Error::Precondition(format!("{estimator} needs n >= 1")));
    }
    let h1 = fp.get(1);
    if h1 == fp.n() {
        return Err(Error::Undefined {
            estimator,
            reason: "every symbol was seen once, so the sample coverage estimate is zero".into(),
        });
    }
    Ok(T::one() - T::from_u64_lossy(h1) / T::from_u64_lossy(fp.n()))
}

/// Good-Turing coverage estimator `plug_in / (1 - h_1 / n)`.
pub fn good_turing<T: Scalar>(fp: &Fingerprint) -> Result<Estimate<T>> {
    let c = coverage::<T>(fp, "gt")?;
    let d = T::from_u64_lossy(fp.distinct());
    Ok(Estimate::new(EstimatorKind::GoodTuring, d / c, fp.n()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ChaoLeeVariant {
    /// Coefficient of variation estimate `gamma^2`.
    First,
    /// Bias-corrected `gamma~^2`.
    Second,
}

/// Chao-Lee coverage estimators with coefficient-of-variation correction; see the
/// module documentation for the formulas.
pub fn chao_lee<T: Scalar>(fp: &Fingerprint, variant: ChaoLeeVariant) -> Result<Estimate<T>> {
    let (name, kind) = match variant {
        ChaoLeeVariant::First => ("cl1", EstimatorKind::ChaoLee1),
        ChaoLeeVariant::Second => ("cl2", EstimatorKind::ChaoLee2),
    };
    fp.require_uncensored(name)?;
    if fp.n() < 2 {
        return Err(Error::Precondition(format!("{name} needs n >= 2")));
    }
    let c = coverage::<T>(fp, name)?;
    let n = T::from_u64_lossy(fp.n());
    let d = T::from_u64_lossy(fp.distinct());
    let s2 = fp.iter().fold(T::zero(), |acc, (j, hj)| {
        let jf = T::from_u64_lossy(j);
        acc + jf * (jf - T::one()) * T::from_u64_lossy(hj)
    });
    let pairs = n * (n - T::one());
    let gamma2 = (d / c * s2 / pairs - T::one()).max(T::zero());
    let uncovered = n * (T::one() - c) / c;
    let gamma2 = match variant {
        ChaoLeeVariant::First => gamma2,
        ChaoLeeVariant::Second => (gamma2 * (T::one() + uncovered * s2 / pairs)).max(T::zero()),
    };
    Ok(Estimate::new(kind, d / c + uncovered * gamma2, fp.n()))
}

/// Efron-Thisted: `plug_in + sum_{j=1}^{J} (-1)^{j+1} t^j b_j h_j` with
/// `b_j = P[Binomial(J, 1/(t+1)) >= j]`.
pub fn efron_thisted<T: Scalar>(fp: &Fingerprint, t: T, terms: usize) -> Result<Estimate<T>> {
    if !(t > T::zero()) || !t.is_finite() {
        return Err(Error::param(format!("t = {t} must be positive")));
    }
    if terms == 0 {
        return Err(Error::param("J must be at least 1"));
    }
    fp.distinct_above(terms as u64, "et")?;
    let tails = binomial_upper_tails(terms, T::one() / (t + T::one()));
    let mut value = T::from_u64_lossy(fp.distinct());
    let mut tj = T::one();
    for j in 1..=terms {
        tj = tj * t;
        let term = tj * tails[j] * T::from_u64_lossy(fp.get(j as u64));
        value = if j % 2 == 1 { value + term } else { value - term };
    }
    Ok(Estimate::new(EstimatorKind::EfronThisted, value, fp.n()))
}

// P[Binomial(m, p) >= j] for j = 0..=m.
fn binomial_upper_tails<T: Scalar>(m: usize, p: T) -> Vec<T> {
    let q = T::one() - p;
    let mut pmf = vec![T::zero(); m + 1];
    // pmf by recurrence from P[X = 0] = q^m
    pmf[0] = q.powi(m as i32);
    for j in 1..=m {
        let jf = T::from_usize(j).unwrap();
        let mf = T::from_usize(m).unwrap();
        pmf[j] = if q == T::zero() {
            if j == m {
                T::one()
            } else {
                T::zero()
            }
        } else {
            pmf[j - 1] * (mf - jf + T::one()) / jf * p / q
        };
    }
    let mut tails = vec![T::zero(); m + 2];
    for j in (0..=m).rev() {
        tails[j] = tails[j + 1] + pmf[j];
    }
    tails.truncate(m + 1);
    tails
}

/// Good-Toulmin: `plug_in + sum_j (-1)^{j+1} t^j h_j`.
pub fn good_toulmin<T: Scalar>(fp: &Fingerprint, t: T) -> Result<Estimate<T>> {
    if !(t > T::zero()) || !t.is_finite() {
        return Err(Error::param(format!("t = {t} must be positive")));
    }
    fp.require_uncensored("gtoulmin")?;
    let mut value = T::from_u64_lossy(fp.distinct());
    for (j, hj) in fp.iter() {
        let term = t.powi(j as i32) * T::from_u64_lossy(hj);
        value = if j % 2 == 1 { value + term } else { value - term };
    }
    Ok(Estimate::new(EstimatorKind::GoodToulmin, value, fp.n()))
}
