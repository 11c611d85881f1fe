//! Ingestion: token streams and fingerprint tables to [`Histogram`] / [`Fingerprint`].

mod fpfile;
mod resample;
mod tokenize;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use fpfile::{parse_fingerprint, read_fingerprint_file, render_fingerprint, write_fingerprint_file};
pub use resample::{resample, ResampleUnit};
pub use tokenize::{
    count_tokens, for_each_token, read_paragraphs, tokenize, TextEncoding, TokenCounter,
    TokenizerConfig,
};

/// Dense integer id of an interned symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SymbolId(pub u64);

impl fmt::Display for SymbolId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// Symbol counts of a sample. Only symbols with a positive count are stored.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Histogram {
    // sorted by id, every count >= 1
    entries: Vec<(SymbolId, u64)>,
    n: u64,
}

impl Histogram {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a histogram from a dense count vector indexed by symbol id; zero
    /// entries are dropped.
    pub fn from_dense_counts(counts: &[u64]) -> Self {
        let mut n = 0;
        let entries = counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(i, &c)| {
                n += c;
                (SymbolId(i as u64), c)
            })
            .collect();
        Self { entries, n }
    }

    /// Builds a histogram from `(symbol, count)` pairs. Counts must be positive and
    /// symbols distinct.
    pub fn from_counts<I>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (SymbolId, u64)>,
    {
        let mut entries: Vec<(SymbolId, u64)> = pairs.into_iter().collect();
        entries.sort_unstable_by_key(|&(id, _)| id);
        let mut n: u64 = 0;
        for (i, &(id, c)) in entries.iter().enumerate() {
            if c == 0 {
                return Err(Error::param(format!("symbol {id} has a zero count")));
            }
            if i > 0 && entries[i - 1].0 == id {
                return Err(Error::param(format!("symbol {id} listed twice")));
            }
            n = n
                .checked_add(c)
                .ok_or_else(|| Error::param("total count overflows u64"))?;
        }
        Ok(Self { entries, n })
    }

    /// Total number of samples.
    pub fn n(&self) -> u64 {
        self.n
    }

    /// Number of distinct observed symbols.
    pub fn distinct(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, id: SymbolId) -> u64 {
        self.entries
            .binary_search_by_key(&id, |&(s, _)| s)
            .map(|i| self.entries[i].1)
            .unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (SymbolId, u64)> + '_ {
        self.entries.iter().copied()
    }

    pub fn counts(&self) -> impl Iterator<Item = u64> + '_ {
        self.entries.iter().map(|&(_, c)| c)
    }
}

/// Types whose multiplicity exceeds `above` but was not recorded individually.
///
/// Published frequency tables often end with a row such as "more than 100: 846".
/// Those types count towards the observed support; their tokens are not part of `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CensoredTail {
    pub above: u64,
    pub types: u64,
}

/// Counts of counts: `h_j` is the number of symbols seen exactly `j` times.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Fingerprint {
    h: BTreeMap<u64, u64>,
    n: u64,
    tail: Option<CensoredTail>,
}

impl Fingerprint {
    /// Builds a fingerprint from `(j, h_j)` pairs with `j >= 1`, `h_j >= 1` and no
    /// repeated `j`. `n` is derived as the sum of `j * h_j`.
    pub fn from_pairs<I>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (u64, u64)>,
    {
        let mut h = BTreeMap::new();
        let mut n: u64 = 0;
        for (j, hj) in pairs {
            if j == 0 || hj == 0 {
                return Err(Error::param(format!(
                    "fingerprint entry ({j}, {hj}) must have j >= 1 and h_j >= 1"
                )));
            }
            if h.insert(j, hj).is_some() {
                return Err(Error::param(format!("multiplicity {j} listed twice")));
            }
            let mass = j
                .checked_mul(hj)
                .and_then(|m| n.checked_add(m))
                .ok_or_else(|| Error::param("sample size overflows u64"))?;
            n = mass;
        }
        Ok(Self { h, n, tail: None })
    }

    /// Attaches a censored tail. `above` must be at least the largest recorded
    /// multiplicity.
    pub fn with_tail(mut self, tail: CensoredTail) -> Result<Self> {
        if tail.types == 0 {
            return Err(Error::param("censored tail must contain at least one type"));
        }
        if let Some(max) = self.max_multiplicity() {
            if tail.above < max {
                return Err(Error::param(format!(
                    "censored tail threshold {} is below recorded multiplicity {max}",
                    tail.above
                )));
            }
        }
        self.tail = Some(tail);
        Ok(self)
    }

    /// Sample size: the sum of `j * h_j` over recorded rows.
    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn get(&self, j: u64) -> u64 {
        self.h.get(&j).copied().unwrap_or(0)
    }

    /// Recorded `(j, h_j)` pairs in increasing `j`.
    pub fn iter(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.h.iter().map(|(&j, &hj)| (j, hj))
    }

    pub fn tail(&self) -> Option<CensoredTail> {
        self.tail
    }

    pub fn is_empty(&self) -> bool {
        self.h.is_empty() && self.tail.is_none()
    }

    pub fn max_multiplicity(&self) -> Option<u64> {
        self.h.keys().next_back().copied()
    }

    /// Number of distinct observed symbols, censored tail included.
    pub fn distinct(&self) -> u64 {
        self.h.values().sum::<u64>() + self.tail.map_or(0, |t| t.types)
    }

    /// Number of symbols seen more than `cutoff` times. Fails when the censored tail
    /// starts below `cutoff`, since the split is then unknown.
    pub fn distinct_above(&self, cutoff: u64, estimator: &'static str) -> Result<u64> {
        let tail = match self.tail {
            Some(t) if t.above < cutoff => {
                return Err(Error::Censored {
                    estimator,
                    above: t.above,
                })
            }
            Some(t) => t.types,
            None => 0,
        };
        Ok(self.h.range(cutoff + 1..).map(|(_, &v)| v).sum::<u64>() + tail)
    }

    pub(crate) fn require_uncensored(&self, estimator: &'static str) -> Result<()> {
        match self.tail {
            Some(t) => Err(Error::Censored {
                estimator,
                above: t.above,
            }),
            None => Ok(()),
        }
    }
}

/// Builds the histogram of a token sequence. Symbols get ids in order of first
/// appearance.
pub fn build_histogram<I, S>(tokens: I) -> Histogram
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let mut counter = TokenCounter::new();
    for t in tokens {
        counter.push(t.as_ref());
    }
    counter.histogram()
}

/// Fingerprint of a histogram: `h_j = |{s : count(s) = j}|`.
pub fn fingerprint_of(hist: &Histogram) -> Fingerprint {
    let mut h = BTreeMap::new();
    for c in hist.counts() {
        *h.entry(c).or_insert(0) += 1;
    }
    Fingerprint {
        h,
        n: hist.n(),
        tail: None,
    }
}
