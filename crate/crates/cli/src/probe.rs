//! Empirical sample complexity: the smallest `n` at which
//! `P[|S_hat - S| >= epsilon k] <= delta`, estimated by Monte Carlo.
//!
//! The search assumes the failure rate falls with `n`. It bisects `[0, ceiling]` down
//! to a relative resolution, then re-tests the candidate with four times as many
//! trials; if the larger batch fails, the search resumes above the candidate. Trial
//! `t` at size `n` uses seed `derive_seed(seed, n, t)`, so re-tests extend the
//! original batch. Above `n = c1 k ln k` the Chebyshev estimator has an empty
//! approximation interval and the probe evaluates the plug-in estimator there.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use support_size::synth::{derive_seed, Family};
use support_size::{EstimatorConfig64, EstimatorKind, Error};

use crate::error::CliResult;
use crate::output::CsvRecord;
use crate::sweep::{draw_fingerprint, CellEstimator, Sampling};

#[derive(Debug, Clone)]
pub struct ProbeSpec {
    pub family: Family,
    pub estimator: EstimatorKind,
    pub epsilon: f64,
    pub delta: f64,
    pub trials: usize,
    pub seed: u64,
    /// Largest `n` tried; defaults to `10 k ln k`.
    pub ceiling: Option<u64>,
    /// Stop bisecting once the bracket is narrower than this fraction of its top.
    pub resolution: f64,
    pub sampling: Sampling,
    pub config: EstimatorConfig64,
    pub k: Option<f64>,
}

impl ProbeSpec {
    pub fn new(family: Family, estimator: EstimatorKind, epsilon: f64) -> Self {
        Self {
            family,
            estimator,
            epsilon,
            delta: 0.1,
            trials: 100,
            seed: 0,
            ceiling: None,
            resolution: 0.01,
            sampling: Sampling::Iid,
            config: EstimatorConfig64::default(),
            k: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeResult {
    pub family: String,
    pub estimator: EstimatorKind,
    pub epsilon: f64,
    pub delta: f64,
    pub k: f64,
    pub support_size: u64,
    /// `None` when the failure rate is still above `delta` at the ceiling.
    pub n_star: Option<u64>,
    pub ceiling: u64,
    pub ceiling_reached: bool,
    /// Failures and trials of the confirming batch at `n_star` (or at the ceiling).
    pub failures: usize,
    pub trials: usize,
    pub failure_rate: f64,
    /// 95% Wilson interval for the failure probability.
    pub wilson_low: f64,
    pub wilson_high: f64,
    /// Number of sample sizes evaluated.
    pub evaluations: usize,
}

impl CsvRecord for ProbeResult {
    const HEADER: &'static [&'static str] = &[
        "family",
        "estimator",
        "epsilon",
        "delta",
        "k",
        "support_size",
        "n_star",
        "ceiling",
        "ceiling_reached",
        "failures",
        "trials",
        "failure_rate",
        "wilson_low",
        "wilson_high",
        "evaluations",
    ];
}

/// 95% Wilson score interval for `failures` out of `trials`.
pub fn wilson_interval(failures: usize, trials: usize) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let z = 1.959_963_984_540_054;
    let t = trials as f64;
    let p = failures as f64 / t;
    let denom = 1.0 + z * z / t;
    let center = (p + z * z / (2.0 * t)) / denom;
    let half = z * (p * (1.0 - p) / t + z * z / (4.0 * t * t)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

struct Tester<'a> {
    spec: &'a ProbeSpec,
    dist: support_size::DiscreteDistribution,
    support: f64,
    k: f64,
    evaluations: usize,
}

impl Tester<'_> {
    fn failures(&mut self, n: u64, trials: usize) -> CliResult<usize> {
        self.evaluations += 1;
        if n == 0 {
            // nothing observed: the estimate is 0 (or undefined)
            let fails = self.support >= self.spec.epsilon * self.k;
            return Ok(if fails { trials } else { 0 });
        }
        let cell = CellEstimator::new(self.spec.estimator, self.k, n, self.spec.config).with_plug_in_fallback();
        let threshold = self.spec.epsilon * self.k;
        let fails = (0..trials as u64)
            .into_par_iter()
            .map(|t| {
                let fp = draw_fingerprint(&self.dist, self.spec.sampling, n, derive_seed(self.spec.seed, n, t))?;
                // an undefined estimate counts as a failure
                Ok(match cell.eval(&fp) {
                    Some(v) => (v - self.support).abs() >= threshold,
                    None => true,
                })
            })
            .collect::<CliResult<Vec<bool>>>()?;
        Ok(fails.into_iter().filter(|&f| f).count())
    }

    fn passes(&mut self, n: u64, trials: usize) -> CliResult<(bool, usize)> {
        let f = self.failures(n, trials)?;
        Ok((f as f64 <= self.spec.delta * trials as f64, f))
    }
}

pub fn probe_sample_complexity(spec: &ProbeSpec) -> CliResult<ProbeResult> {
    let dist = spec.family.build()?;
    let k = spec.k.unwrap_or_else(|| dist.effective_k());
    let support = dist.support_size() as u64;
    if !(spec.delta > 0.0 && spec.delta < 1.0) {
        return Err(Error::InvalidParameter(format!("delta = {} must lie in (0, 1)", spec.delta)).into());
    }
    if spec.trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()).into());
    }
    if !(spec.resolution >= 0.0) {
        return Err(Error::InvalidParameter("resolution must be nonnegative".into()).into());
    }
    let ceiling = spec
        .ceiling
        .unwrap_or_else(|| (10.0 * k * k.ln()).ceil() as u64)
        .max(1);
    let mut result = ProbeResult {
        family: spec.family.to_string(),
        estimator: spec.estimator,
        epsilon: spec.epsilon,
        delta: spec.delta,
        k,
        support_size: support,
        n_star: Some(0),
        ceiling,
        ceiling_reached: false,
        failures: 0,
        trials: 0,
        failure_rate: 0.0,
        wilson_low: 0.0,
        wilson_high: 1.0,
        evaluations: 0,
    };
    if spec.epsilon >= 0.5 {
        // any estimate of k/2 is within epsilon k; the sample complexity is 0 by definition
        return Ok(result);
    }
    if !(spec.epsilon >= 1.0 / k) {
        return Err(Error::Precondition(format!(
            "epsilon = {} must lie in [1/k, 1/2) = [{}, 0.5)",
            spec.epsilon,
            1.0 / k
        ))
        .into());
    }
    let mut tester = Tester {
        spec,
        dist,
        support: support as f64,
        k,
        evaluations: 0,
    };
    let confirm_trials = 4 * spec.trials;
    let finish = |result: &mut ProbeResult, tester: &Tester, n: Option<u64>, failures: usize| {
        result.n_star = n;
        result.ceiling_reached = n.is_none();
        result.failures = failures;
        result.trials = confirm_trials;
        result.failure_rate = failures as f64 / confirm_trials as f64;
        let (lo, hi) = wilson_interval(failures, confirm_trials);
        result.wilson_low = lo;
        result.wilson_high = hi;
        result.evaluations = tester.evaluations;
    };

    let (top_ok, _) = tester.passes(ceiling, spec.trials)?;
    if !top_ok {
        let f = tester.failures(ceiling, confirm_trials)?;
        finish(&mut result, &tester, None, f);
        return Ok(result);
    }
    let mut lo = 0u64;
    let mut hi = ceiling;
    loop {
        while hi - lo > ((spec.resolution * hi as f64).ceil() as u64).max(1) {
            let mid = lo + (hi - lo) / 2;
            if tester.passes(mid, spec.trials)?.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let (ok, f) = tester.passes(hi, confirm_trials)?;
        if ok {
            finish(&mut result, &tester, Some(hi), f);
            return Ok(result);
        }
        if hi == ceiling {
            finish(&mut result, &tester, None, f);
            return Ok(result);
        }
        // the candidate was a Monte Carlo fluke: step up until a batch passes again
        lo = hi;
        loop {
            let next = (lo + lo / 4 + 1).min(ceiling);
            if tester.passes(next, spec.trials)?.0 {
                hi = next;
                break;
            }
            lo = next;
            if next == ceiling {
                let f = tester.failures(ceiling, confirm_trials)?;
                finish(&mut result, &tester, None, f);
                return Ok(result);
            }
        }
    }
}
