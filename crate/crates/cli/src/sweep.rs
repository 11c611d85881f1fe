//! Simulation sweeps: for each sample size and estimator, the mean, standard
//! deviation and RMSE of the estimates against the true support size.
//!
//! Trial `t` at sample size `n` draws its sample with seed `derive_seed(seed, n, t)`.
//! All estimators see the same samples, and a row does not depend on which other
//! sample sizes are in the grid.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use support_size::estimators::{estimate, wy_estimate_with, wy_table};
use support_size::synth::{derive_seed, sample_iid, sample_poissonized, Family};
use support_size::{fingerprint_of, CoefficientTable64, Error, EstimatorConfig64, EstimatorKind, Fingerprint};

use crate::error::{CliError, CliResult};
use crate::output::CsvRecord;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sampling {
    /// `n` iid draws (multinomial counts).
    Iid,
    /// Independent `Poi(n p_i)` counts.
    Poissonized,
}

impl fmt::Display for Sampling {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sampling::Iid => "iid",
            Sampling::Poissonized => "poissonized",
        })
    }
}

impl FromStr for Sampling {
    type Err = CliError;

    fn from_str(s: &str) -> CliResult<Self> {
        match s {
            "iid" => Ok(Sampling::Iid),
            "poissonized" | "poisson" => Ok(Sampling::Poissonized),
            _ => Err(CliError::Usage(format!(
                "unknown sampling \"{s}\" (expected iid or poissonized)"
            ))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub family: Family,
    pub n_grid: Vec<u64>,
    pub trials: usize,
    pub estimators: Vec<EstimatorKind>,
    pub seed: u64,
    pub sampling: Sampling,
    pub config: EstimatorConfig64,
    /// `k` handed to the Chebyshev estimator; defaults to `1 / min_mass`.
    pub k: Option<f64>,
}

impl SweepSpec {
    pub fn new(family: Family, n_grid: Vec<u64>, estimators: Vec<EstimatorKind>) -> Self {
        Self {
            family,
            n_grid,
            trials: 50,
            estimators,
            seed: 0,
            sampling: Sampling::Poissonized,
            config: EstimatorConfig64::default(),
            k: None,
        }
    }

    pub fn validate(&self) -> CliResult<()> {
        if self.n_grid.is_empty() {
            return Err(CliError::Usage("the n grid is empty".into()));
        }
        if self.n_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(CliError::Usage("the n grid must be strictly increasing".into()));
        }
        if self.trials == 0 {
            return Err(CliError::Usage("trials must be at least 1".into()));
        }
        if self.estimators.is_empty() {
            return Err(CliError::Usage("no estimators selected".into()));
        }
        if let Some(k) = self.k {
            if !(k >= 2.0) || !k.is_finite() {
                return Err(CliError::Usage(format!("k = {k} must be at least 2")));
            }
        }
        Ok(())
    }
}

/// One `(estimator, n)` cell. Moments are over the defined trials only; a cell where
/// every trial was undefined has no moments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub family: String,
    pub sampling: Sampling,
    pub estimator: EstimatorKind,
    pub n: u64,
    pub support_size: u64,
    pub k: f64,
    pub trials: usize,
    pub undefined_count: usize,
    pub mean_estimate: Option<f64>,
    /// Sample standard deviation (divisor `m - 1`, 0 for a single defined trial).
    pub std_dev: Option<f64>,
    pub rmse: Option<f64>,
}

impl CsvRecord for SweepRow {
    const HEADER: &'static [&'static str] = &[
        "family",
        "sampling",
        "estimator",
        "n",
        "support_size",
        "k",
        "trials",
        "undefined_count",
        "mean_estimate",
        "std_dev",
        "rmse",
    ];
}

/// `count` sample sizes spaced geometrically over `[lo, hi]`, rounded and deduplicated.
pub fn geometric_grid(lo: f64, hi: f64, count: usize) -> CliResult<Vec<u64>> {
    if !(lo >= 1.0 && hi >= lo) || count == 0 {
        return Err(CliError::Usage(format!(
            "geometric grid needs 1 <= lo <= hi and count >= 1, got {lo}:{hi}:{count}"
        )));
    }
    let mut grid: Vec<u64> = (0..count)
        .map(|i| {
            let f = if count == 1 { 0.0 } else { i as f64 / (count - 1) as f64 };
            (lo * (hi / lo).powf(f)).round() as u64
        })
        .collect();
    grid.dedup();
    Ok(grid)
}

pub(crate) fn draw_fingerprint(
    dist: &support_size::DiscreteDistribution,
    sampling: Sampling,
    n: u64,
    seed: u64,
) -> CliResult<Fingerprint> {
    let hist = match sampling {
        Sampling::Iid => sample_iid(dist, n, seed),
        Sampling::Poissonized => sample_poissonized(dist, n as f64, seed)?,
    };
    Ok(fingerprint_of(&hist))
}

/// Evaluator for one sample size: the Chebyshev table is built once and shared.
pub(crate) struct CellEstimator {
    kind: EstimatorKind,
    k: f64,
    config: EstimatorConfig64,
    table: Option<Result<CoefficientTable64, Error>>,
}

impl CellEstimator {
    pub(crate) fn new(kind: EstimatorKind, k: f64, n: u64, config: EstimatorConfig64) -> Self {
        let table = (kind == EstimatorKind::Chebyshev)
            .then(|| wy_table(k, n.max(1), &config));
        Self {
            kind,
            k,
            config,
            table,
        }
    }

    /// Swaps a Chebyshev cell whose interval is empty (`n >= c1 k ln k`) for the
    /// plug-in estimator, which is what the method prescribes in that regime.
    pub(crate) fn with_plug_in_fallback(mut self) -> Self {
        if let Some(Err(Error::DegenerateInterval { .. })) = self.table {
            self.kind = EstimatorKind::PlugIn;
            self.table = None;
        }
        self
    }

    /// `None` when the estimator is undefined on this sample.
    pub(crate) fn eval(&self, fp: &Fingerprint) -> Option<f64> {
        let est = match &self.table {
            Some(Ok(table)) => wy_estimate_with(fp, self.k, table),
            Some(Err(_)) => return None,
            None => estimate(self.kind, fp, self.k, &self.config),
        };
        est.ok().map(|e| e.value).filter(|v| v.is_finite())
    }
}

pub fn run_sweep(spec: &SweepSpec) -> CliResult<Vec<SweepRow>> {
    spec.validate()?;
    let dist = spec.family.build()?;
    let support = dist.support_size() as u64;
    let k = spec.k.unwrap_or_else(|| dist.effective_k());
    let mut rows = Vec::with_capacity(spec.n_grid.len() * spec.estimators.len());
    for &n in &spec.n_grid {
        let cells: Vec<CellEstimator> = spec
            .estimators
            .iter()
            .map(|&kind| CellEstimator::new(kind, k, n, spec.config))
            .collect();
        let per_trial: Vec<Vec<Option<f64>>> = (0..spec.trials as u64)
            .into_par_iter()
            .map(|t| {
                let fp = draw_fingerprint(&dist, spec.sampling, n, derive_seed(spec.seed, n, t))?;
                Ok(cells.iter().map(|c| c.eval(&fp)).collect())
            })
            .collect::<CliResult<_>>()?;
        for (i, &kind) in spec.estimators.iter().enumerate() {
            let values: Vec<f64> = per_trial.iter().filter_map(|v| v[i]).collect();
            rows.push(summarize(spec, kind, n, support, k, &values));
        }
    }
    Ok(rows)
}

fn summarize(spec: &SweepSpec, kind: EstimatorKind, n: u64, support: u64, k: f64, values: &[f64]) -> SweepRow {
    let m = values.len();
    let (mean, std_dev, rmse) = if m == 0 {
        (None, None, None)
    } else {
        let mf = m as f64;
        let mean = values.iter().sum::<f64>() / mf;
        let ss: f64 = values.iter().map(|v| (v - mean).powi(2)).sum();
        let std = if m > 1 { (ss / (mf - 1.0)).sqrt() } else { 0.0 };
        let truth = support as f64;
        let mse = values.iter().map(|v| (v - truth).powi(2)).sum::<f64>() / mf;
        (Some(mean), Some(std), Some(mse.sqrt()))
    };
    SweepRow {
        family: spec.family.to_string(),
        sampling: spec.sampling,
        estimator: kind,
        n,
        support_size: support,
        k,
        trials: spec.trials,
        undefined_count: spec.trials - m,
        mean_estimate: mean,
        std_dev,
        rmse,
    }
}
