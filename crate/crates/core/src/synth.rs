//! Synthetic distribution families and seeded samplers.
//!
//! All randomness goes through ChaCha20 (`rand_chacha::ChaCha20Rng`) seeded with
//! `seed_from_u64`, so a `(distribution, n, seed)` triple produces the same histogram
//! on every platform. Per-trial seeds come from [`derive_seed`], a SplitMix64 mix of
//! the master seed, a stream tag and the trial index.
//!
//! Fixed-n draws use Walker's alias method; Poissonized draws sample each symbol count
//! independently from `Poi(n p_i)`.

use std::fmt;
use std::str::FromStr;

use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::weighted::WeightedAliasIndex;
use rand_distr::Poisson;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ingest::Histogram;

/// The generator behind every sampler in the crate.
pub type Rng = ChaCha20Rng;

pub fn seeded_rng(seed: u64) -> Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// `splitmix64(splitmix64(splitmix64(master) ^ stream) ^ index)`.
pub fn derive_seed(master: u64, stream: u64, index: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(master) ^ stream) ^ index)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscreteDistribution {
    masses: Vec<f64>,
    min_mass: f64,
    family_label: String,
}

impl DiscreteDistribution {
    /// Normalizes positive weights into a distribution.
    pub fn from_weights(weights: Vec<f64>, family_label: impl Into<String>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::EmptyInput("distribution weights"));
        }
        if let Some(w) = weights.iter().find(|w| !(**w > 0.0) || !w.is_finite()) {
            return Err(Error::param(format!("weights must be positive and finite, got {w}")));
        }
        let total = neumaier_sum(&weights);
        let masses: Vec<f64> = weights.into_iter().map(|w| w / total).collect();
        Ok(Self::from_normalized(masses, family_label.into()))
    }

    fn from_normalized(masses: Vec<f64>, family_label: String) -> Self {
        let min_mass = masses.iter().copied().fold(f64::INFINITY, f64::min);
        Self {
            masses,
            min_mass,
            family_label,
        }
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn min_mass(&self) -> f64 {
        self.min_mass
    }

    pub fn family_label(&self) -> &str {
        &self.family_label
    }

    /// Number of atoms, all of which carry positive mass.
    pub fn support_size(&self) -> usize {
        self.masses.len()
    }

    /// `1 / min_mass`, the `k` an estimator should be given for this distribution.
    pub fn effective_k(&self) -> f64 {
        self.min_mass.recip()
    }
}

fn neumaier_sum(xs: &[f64]) -> f64 {
    let mut sum = 0.0;
    let mut c = 0.0;
    for &x in xs {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            c += (sum - t) + x;
        } else {
            c += (x - t) + sum;
        }
        sum = t;
    }
    sum + c
}

pub fn make_uniform(k: usize) -> Result<DiscreteDistribution> {
    if k == 0 {
        return Err(Error::param("uniform needs k >= 1"));
    }
    Ok(DiscreteDistribution::from_normalized(
        vec![1.0 / k as f64; k],
        format!("uniform:k={k}"),
    ))
}

/// `p_i` proportional to `i^-alpha`, `i = 1..=k`.
pub fn make_zipf(k: usize, alpha: f64) -> Result<DiscreteDistribution> {
    if k == 0 {
        return Err(Error::param("zipf needs k >= 1"));
    }
    if !(alpha >= 0.0) || !alpha.is_finite() {
        return Err(Error::param(format!("zipf exponent {alpha} must be nonnegative")));
    }
    if alpha == 0.0 {
        let mut p = make_uniform(k)?;
        p.family_label = format!("zipf:k={k},alpha=0");
        return Ok(p);
    }
    let weights = (1..=k).map(|i| (i as f64).powf(-alpha)).collect();
    DiscreteDistribution::from_weights(weights, format!("zipf:k={k},alpha={alpha}"))
}

/// Even mixture: the first `k/2` atoms are proportional to `1/i`, the last `k/2` to
/// `(1 - 2/k)^(i-1)`, and each half carries total mass 1/2.
pub fn make_mixture(k: usize) -> Result<DiscreteDistribution> {
    if k < 4 || k % 2 == 1 {
        return Err(Error::param(format!("mixture needs an even k >= 4, got {k}")));
    }
    let half = k / 2;
    let harmonic: Vec<f64> = (1..=half).map(|i| 1.0 / i as f64).collect();
    let ratio = 1.0 - 2.0 / k as f64;
    let geometric: Vec<f64> = (0..half).map(|i| ratio.powi(i as i32)).collect();
    let (zh, zg) = (neumaier_sum(&harmonic), neumaier_sum(&geometric));
    let masses = harmonic
        .iter()
        .map(|w| 0.5 * w / zh)
        .chain(geometric.iter().map(|w| 0.5 * w / zg))
        .collect();
    Ok(DiscreteDistribution::from_normalized(masses, format!("mixture:k={k}")))
}

/// A parsed family description such as `zipf:k=1000,alpha=0.5`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    Uniform { k: usize },
    Zipf { k: usize, alpha: f64 },
    Mixture { k: usize },
}

impl Family {
    pub fn build(&self) -> Result<DiscreteDistribution> {
        match *self {
            Family::Uniform { k } => make_uniform(k),
            Family::Zipf { k, alpha } => make_zipf(k, alpha),
            Family::Mixture { k } => make_mixture(k),
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Uniform { k } => write!(f, "uniform:k={k}"),
            Family::Zipf { k, alpha } => write!(f, "zipf:k={k},alpha={alpha}"),
            Family::Mixture { k } => write!(f, "mixture:k={k}"),
        }
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |why: &str| Error::param(format!("family \"{s}\": {why}"));
        let (name, rest) = s.split_once(':').ok_or_else(|| bad("expected name:key=value,..."))?;
        let mut k = None;
        let mut alpha = None;
        for kv in rest.split(',').map(str::trim).filter(|kv| !kv.is_empty()) {
            let (key, value) = kv.split_once('=').ok_or_else(|| bad("expected key=value"))?;
            match key.trim() {
                "k" => {
                    // accept 1e6 style as long as it is integral
                    let v: f64 = value.trim().parse().map_err(|_| bad("k is not a number"))?;
                    if v < 1.0 || v.fract() != 0.0 || v > u32::MAX as f64 {
                        return Err(bad("k must be a positive integer"));
                    }
                    k = Some(v as usize);
                }
                "alpha" => {
                    alpha = Some(value.trim().parse::<f64>().map_err(|_| bad("alpha is not a number"))?)
                }
                other => return Err(bad(&format!("unknown key {other}"))),
            }
        }
        let k = k.ok_or_else(|| bad("missing k"))?;
        match name.trim() {
            "uniform" => Ok(Family::Uniform { k }),
            "mixture" => Ok(Family::Mixture { k }),
            "zipf" => Ok(Family::Zipf {
                k,
                alpha: alpha.ok_or_else(|| bad("missing alpha"))?,
            }),
            other => Err(bad(&format!("unknown family {other}"))),
        }
    }
}

/// Dense per-symbol counts of `n` iid draws (multinomial).
pub fn sample_iid_counts(p: &DiscreteDistribution, n: u64, rng: &mut Rng) -> Vec<u64> {
    let mut counts = vec![0u64; p.support_size()];
    if n == 0 {
        return counts;
    }
    if p.support_size() == 1 {
        counts[0] = n;
        return counts;
    }
    let alias = WeightedAliasIndex::new(p.masses.clone()).expect("masses are positive and finite");
    for _ in 0..n {
        counts[alias.sample(rng)] += 1;
    }
    counts
}

/// Dense per-symbol counts with independent `N_i ~ Poi(n p_i)`.
pub fn sample_poissonized_counts(p: &DiscreteDistribution, n: f64, rng: &mut Rng) -> Vec<u64> {
    p.masses
        .iter()
        .map(|&m| {
            let mean = n * m;
            if mean > 0.0 {
                Poisson::new(mean).expect("positive finite mean").sample(rng) as u64
            } else {
                0
            }
        })
        .collect()
}

/// Histogram of `n` iid draws from `p`; symbol `i` is atom `i`.
pub fn sample_iid(p: &DiscreteDistribution, n: u64, seed: u64) -> Histogram {
    Histogram::from_dense_counts(&sample_iid_counts(p, n, &mut seeded_rng(seed)))
}

/// Histogram with independent `Poi(n p_i)` counts.
pub fn sample_poissonized(p: &DiscreteDistribution, n: f64, seed: u64) -> Result<Histogram> {
    if !(n >= 0.0) || !n.is_finite() {
        return Err(Error::param(format!("sample size {n} must be finite and nonnegative")));
    }
    Ok(Histogram::from_dense_counts(&sample_poissonized_counts(
        p,
        n,
        &mut seeded_rng(seed),
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::SymbolId;
    use proptest::prelude::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-14 * b.abs().max(1.0)
    }

    #[test]
    fn uniform_examples() {
        assert_eq!(make_uniform(4).unwrap().masses(), &[0.25; 4]);
        assert_eq!(make_uniform(1).unwrap().masses(), &[1.0]);
        let u = make_uniform(1000).unwrap();
        assert_eq!(u.effective_k(), 1000.0);
        assert_eq!(u.support_size(), 1000);
        assert!(make_uniform(0).is_err());
    }

    #[test]
    fn zipf_examples() {
        assert_eq!(make_zipf(7, 0.0).unwrap().masses(), make_uniform(7).unwrap().masses());
        let z = make_zipf(2, 1.0).unwrap();
        assert!(close(z.masses()[0], 2.0 / 3.0) && close(z.masses()[1], 1.0 / 3.0));
        let w = [1.0, 0.5f64.sqrt(), (1.0f64 / 3.0).sqrt()];
        let zsum: f64 = w.iter().sum();
        let z = make_zipf(3, 0.5).unwrap();
        for (m, wi) in z.masses().iter().zip(w) {
            assert!(close(*m, wi / zsum));
        }
        let k = 1000;
        let hk: f64 = (1..=k).map(|i| 1.0 / i as f64).sum();
        assert!((make_zipf(k, 1.0).unwrap().effective_k() - k as f64 * hk).abs() < 1e-9);
        assert!(make_zipf(3, -1.0).is_err());
    }

    #[test]
    fn mixture_examples() {
        let m = make_mixture(4).unwrap();
        let want = [1.0 / 3.0, 1.0 / 6.0, 1.0 / 3.0, 1.0 / 6.0];
        for (a, b) in m.masses().iter().zip(want) {
            assert!(close(*a, b));
        }
        assert!((m.effective_k() - 6.0).abs() < 1e-12);
        let m = make_mixture(10).unwrap();
        let second = &m.masses()[5..];
        let second_min = second.iter().copied().fold(f64::INFINITY, f64::min);
        assert_eq!(second_min, second[4]);
        assert!((second.iter().sum::<f64>() - 0.5).abs() < 1e-14);
        assert!(make_mixture(7).is_err());
        assert!(make_mixture(2).is_err());
    }

    #[test]
    fn family_parsing() {
        assert_eq!("uniform:k=100".parse::<Family>().unwrap(), Family::Uniform { k: 100 });
        assert_eq!(
            "zipf:k=1e6,alpha=0.5".parse::<Family>().unwrap(),
            Family::Zipf { k: 1_000_000, alpha: 0.5 }
        );
        assert_eq!("mixture:k=10".parse::<Family>().unwrap(), Family::Mixture { k: 10 });
        for bad in ["uniform", "zipf:k=10", "foo:k=3", "uniform:k=2.5", "uniform:q=3"] {
            assert!(bad.parse::<Family>().is_err(), "{bad}");
        }
        let f = Family::Zipf { k: 10, alpha: 1.5 };
        assert_eq!(f.to_string().parse::<Family>().unwrap(), f);
    }

    #[test]
    fn samplers_degenerate_cases() {
        let u = make_uniform(5).unwrap();
        assert!(sample_iid(&u, 0, 1).is_empty());
        assert!(sample_poissonized(&u, 0.0, 1).unwrap().is_empty());
        let point = make_uniform(1).unwrap();
        let h = sample_iid(&point, 7, 3);
        assert_eq!(h.get(SymbolId(0)), 7);
        assert!(sample_poissonized(&u, -1.0, 1).is_err());
    }

    #[test]
    fn samplers_are_reproducible() {
        let z = make_zipf(500, 1.0).unwrap();
        assert_eq!(sample_iid(&z, 2000, 42), sample_iid(&z, 2000, 42));
        assert_ne!(sample_iid(&z, 2000, 42), sample_iid(&z, 2000, 43));
        assert_eq!(
            sample_poissonized(&z, 2000.0, 9).unwrap(),
            sample_poissonized(&z, 2000.0, 9).unwrap()
        );
    }

    #[test]
    fn iid_counts_concentrate() {
        let u = make_uniform(1000).unwrap();
        for seed in 0..3 {
            let h = sample_iid(&u, 1_000_000, seed);
            assert_eq!(h.n(), 1_000_000);
            let sigma = (1e6_f64 * 1e-3 * (1.0 - 1e-3)).sqrt();
            assert_eq!(h.distinct(), 1000);
            for c in h.counts() {
                assert!((c as f64 - 1000.0).abs() < 5.0 * sigma);
            }
        }
    }

    #[test]
    fn poissonized_total_mean() {
        let z = make_zipf(2000, 0.7).unwrap();
        let trials = 200;
        let n = 5000.0;
        let mean = (0..trials)
            .map(|s| sample_poissonized(&z, n, derive_seed(1, 2, s)).unwrap().n() as f64)
            .sum::<f64>()
            / trials as f64;
        // sd of the mean is sqrt(n / trials)
        assert!((mean - n).abs() < 3.0 * (n / trials as f64).sqrt());
    }

    #[test]
    fn poissonized_plug_in_is_binomial() {
        // plug-in under uniform(k) Poissonized is Binom(k, 1 - e^{-n/k})
        let k = 200;
        let n = 150.0;
        let u = make_uniform(k).unwrap();
        let q = 1.0 - (-n / k as f64).exp();
        let trials = 2000u64;
        let mut observed: Vec<f64> = (0..trials)
            .map(|s| sample_poissonized(&u, n, derive_seed(7, 0, s)).unwrap().distinct() as f64)
            .collect();
        observed.sort_by(|a, b| a.partial_cmp(b).unwrap());
        // binomial cdf by recurrence
        let mut pmf = vec![0.0f64; k + 1];
        pmf[0] = (1.0 - q).powi(k as i32);
        for j in 1..=k {
            pmf[j] = pmf[j - 1] * (k - j + 1) as f64 / j as f64 * q / (1.0 - q);
        }
        let cdf: Vec<f64> = pmf
            .iter()
            .scan(0.0, |acc, p| {
                *acc += p;
                Some(*acc)
            })
            .collect();
        let ks = (0..=k)
            .map(|x| {
                let below = observed.partition_point(|&o| o <= x as f64) as f64 / trials as f64;
                (below - cdf[x]).abs()
            })
            .fold(0.0, f64::max);
        // 1.63 / sqrt(trials) is the 1% critical value
        assert!(ks < 1.63 / (trials as f64).sqrt(), "ks = {ks}");
    }

    #[test]
    fn derive_seed_separates_streams() {
        assert_ne!(derive_seed(1, 0, 0), derive_seed(1, 1, 0));
        assert_ne!(derive_seed(1, 0, 0), derive_seed(1, 0, 1));
        assert_eq!(derive_seed(5, 3, 9), derive_seed(5, 3, 9));
    }

    proptest! {
        #[test]
        fn families_are_valid(k in 2usize..400, alpha in 0.0f64..3.0) {
            let mut fams = vec![make_uniform(k).unwrap(), make_zipf(k, alpha).unwrap()];
            if k >= 4 && k % 2 == 0 {
                fams.push(make_mixture(k).unwrap());
            }
            for p in fams {
                prop_assert!((p.masses().iter().sum::<f64>() - 1.0).abs() <= 1e-12);
                prop_assert!(p.masses().iter().all(|&m| m >= (1.0 - 1e-12) / p.effective_k()));
                prop_assert_eq!(p.min_mass(), p.masses().iter().copied().fold(f64::INFINITY, f64::min));
            }
        }

        #[test]
        fn iid_total_is_exact(n in 0u64..5000, seed in any::<u64>()) {
            let p = make_zipf(50, 1.2).unwrap();
            prop_assert_eq!(sample_iid(&p, n, seed).n(), n);
        }
    }
}
