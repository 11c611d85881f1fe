use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::synth::seeded_rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ResampleUnit {
    Word,
    Paragraph,
}

/// Draws `ceil(fraction * units)` units uniformly with replacement and concatenates
/// them. With [`ResampleUnit::Word`] every token of `corpus` is a unit; with
/// [`ResampleUnit::Paragraph`] every inner vector is.
pub fn resample<T: Clone>(
    corpus: &[Vec<T>],
    fraction: f64,
    unit: ResampleUnit,
    seed: u64,
) -> Result<Vec<T>> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::param(format!("fraction {fraction} not in (0, 1]")));
    }
    let words: Vec<&T> = match unit {
        ResampleUnit::Word => corpus.iter().flatten().collect(),
        ResampleUnit::Paragraph => Vec::new(),
    };
    let units = match unit {
        ResampleUnit::Word => words.len(),
        ResampleUnit::Paragraph => corpus.len(),
    };
    if units == 0 {
        return Err(Error::EmptyInput("corpus has no units to resample"));
    }
    let draws = draw_count(fraction, units);
    if draws == 0 {
        return Err(Error::Precondition(format!(
            "fraction * units = {} < 1",
            fraction * units as f64
        )));
    }
    let mut rng = seeded_rng(seed);
    let mut out = Vec::new();
    for _ in 0..draws {
        let i = rng.random_range(0..units);
        match unit {
            ResampleUnit::Word => out.push(words[i].clone()),
            ResampleUnit::Paragraph => out.extend(corpus[i].iter().cloned()),
        }
    }
    Ok(out)
}

// ceil(fraction * units), treating products within rounding noise of an integer as
// that integer (0.07 * 100 must give 7). Returns 0 when the product is below 1.
fn draw_count(fraction: f64, units: usize) -> usize {
    let x = fraction * units as f64;
    let nearest = x.round();
    if (x - nearest).abs() <= 1e-9 * x.max(1.0) {
        nearest as usize
    } else if x < 1.0 {
        0
    } else {
        x.ceil() as usize
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn paragraphs() -> Vec<Vec<&'static str>> {
        vec![vec!["a", "b"], vec!["c"], vec!["d", "e", "f"], vec!["g"]]
    }

    #[test]
    fn paragraph_fraction_one_draws_all_units() {
        let corpus = paragraphs();
        let out = resample(&corpus, 1.0, ResampleUnit::Paragraph, 7).unwrap();
        // each drawn paragraph is one of the originals; 4 draws in total
        let mut rest = &out[..];
        let mut draws = 0;
        while !rest.is_empty() {
            let p = corpus.iter().find(|p| rest.starts_with(p)).expect("unit boundary");
            rest = &rest[p.len()..];
            draws += 1;
        }
        assert_eq!(draws, 4);
    }

    #[test]
    fn word_fraction_half() {
        let corpus = vec![(0..10).collect::<Vec<u32>>()];
        let out = resample(&corpus, 0.5, ResampleUnit::Word, 1).unwrap();
        assert_eq!(out.len(), 5);
        assert!(out.iter().all(|w| *w < 10));
    }

    #[test]
    fn deterministic_given_seed() {
        let corpus = paragraphs();
        let a = resample(&corpus, 0.75, ResampleUnit::Paragraph, 99).unwrap();
        let b = resample(&corpus, 0.75, ResampleUnit::Paragraph, 99).unwrap();
        assert_eq!(a, b);
        let w1 = resample(&corpus, 0.6, ResampleUnit::Word, 3).unwrap();
        let w2 = resample(&corpus, 0.6, ResampleUnit::Word, 3).unwrap();
        assert_eq!(w1, w2);
    }

    #[test]
    fn errors() {
        let empty: Vec<Vec<u8>> = vec![];
        assert!(matches!(
            resample(&empty, 0.5, ResampleUnit::Paragraph, 0),
            Err(Error::EmptyInput(_))
        ));
        let corpus = paragraphs();
        assert!(matches!(
            resample(&corpus, 0.1, ResampleUnit::Paragraph, 0),
            Err(Error::Precondition(_))
        ));
        assert!(resample(&corpus, 0.0, ResampleUnit::Word, 0).is_err());
        assert!(resample(&corpus, 1.5, ResampleUnit::Word, 0).is_err());
    }

    #[test]
    fn draw_count_rounding() {
        assert_eq!(draw_count(0.07, 100), 7);
        assert_eq!(draw_count(0.5, 10), 5);
        assert_eq!(draw_count(0.34, 10), 4);
        assert_eq!(draw_count(0.25, 4), 1);
        assert_eq!(draw_count(0.2, 4), 0);
    }
}
