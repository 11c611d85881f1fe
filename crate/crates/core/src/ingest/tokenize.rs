use std::collections::HashMap;
use std::io::BufRead;

use serde::{Deserialize, Serialize};

use super::{Histogram, SymbolId};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TextEncoding {
    #[default]
    Utf8,
    /// ISO-8859-1: every byte is the code point of the same value.
    Latin1,
}

impl TextEncoding {
    fn name(self) -> &'static str {
        match self {
            TextEncoding::Utf8 => "UTF-8",
            TextEncoding::Latin1 => "ISO-8859-1",
        }
    }
}

/// Tokens are whitespace-delimited. With `strip_punctuation` every character that
/// is not a Unicode letter or digit is removed; with `case_fold` tokens are
/// lowercased. Tokens left empty are dropped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenizerConfig {
    pub case_fold: bool,
    pub strip_punctuation: bool,
    pub encoding: TextEncoding,
}

impl Default for TokenizerConfig {
    fn default() -> Self {
        Self {
            case_fold: true,
            strip_punctuation: true,
            encoding: TextEncoding::Utf8,
        }
    }
}

/// Tokenizes an in-memory byte buffer.
pub fn tokenize(text: &[u8], cfg: &TokenizerConfig) -> Result<Vec<String>> {
    let mut out = Vec::new();
    for_each_token(text, cfg, |t| out.push(t.to_owned()))?;
    Ok(out)
}

/// Streams the tokens of `reader` into `sink` without materialising the text.
pub fn for_each_token<R, F>(reader: R, cfg: &TokenizerConfig, mut sink: F) -> Result<()>
where
    R: BufRead,
    F: FnMut(&str),
{
    let mut buf = String::new();
    for_each_line(reader, cfg.encoding, |line| {
        for word in line.split_whitespace() {
            normalize_into(word, cfg, &mut buf);
            if !buf.is_empty() {
                sink(&buf);
            }
        }
    })
}

/// Reads blank-line separated paragraphs, each as its token sequence. Paragraphs
/// without any token are skipped.
pub fn read_paragraphs<R: BufRead>(reader: R, cfg: &TokenizerConfig) -> Result<Vec<Vec<String>>> {
    let mut paragraphs = Vec::new();
    let mut current: Vec<String> = Vec::new();
    let mut buf = String::new();
    for_each_line(reader, cfg.encoding, |line| {
        if line.trim().is_empty() {
            if !current.is_empty() {
                paragraphs.push(std::mem::take(&mut current));
            }
            return;
        }
        for word in line.split_whitespace() {
            normalize_into(word, cfg, &mut buf);
            if !buf.is_empty() {
                current.push(buf.clone());
            }
        }
    })?;
    if !current.is_empty() {
        paragraphs.push(current);
    }
    Ok(paragraphs)
}

/// Single pass from text to histogram; memory grows with the vocabulary, not `n`.
pub fn count_tokens<R: BufRead>(reader: R, cfg: &TokenizerConfig) -> Result<TokenCounter> {
    let mut counter = TokenCounter::new();
    for_each_token(reader, cfg, |t| counter.push(t))?;
    Ok(counter)
}

fn normalize_into(word: &str, cfg: &TokenizerConfig, buf: &mut String) {
    buf.clear();
    for c in word.chars() {
        if cfg.strip_punctuation && !c.is_alphanumeric() {
            continue;
        }
        if cfg.case_fold {
            buf.extend(c.to_lowercase());
        } else {
            buf.push(c);
        }
    }
}

fn for_each_line<R, F>(mut reader: R, encoding: TextEncoding, mut f: F) -> Result<()>
where
    R: BufRead,
    F: FnMut(&str),
{
    let mut bytes = Vec::new();
    let mut latin = String::new();
    let mut offset: u64 = 0;
    loop {
        bytes.clear();
        let read = reader.read_until(b'\n', &mut bytes).map_err(|e| Error::Io {
            path: "<input>".into(),
            source: e,
        })?;
        if read == 0 {
            return Ok(());
        }
        match encoding {
            TextEncoding::Utf8 => {
                let line = std::str::from_utf8(&bytes).map_err(|e| Error::Decode {
                    encoding: encoding.name(),
                    offset: offset + e.valid_up_to() as u64,
                })?;
                f(line);
            }
            TextEncoding::Latin1 => {
                latin.clear();
                latin.extend(bytes.iter().map(|&b| b as char));
                f(&latin);
            }
        }
        offset += read as u64;
    }
}

/// Streaming symbol interner and counter.
#[derive(Debug, Default, Clone)]
pub struct TokenCounter {
    ids: HashMap<Box<str>, u32>,
    names: Vec<Box<str>>,
    counts: Vec<u64>,
    n: u64,
}

impl TokenCounter {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, token: &str) {
        let id = match self.ids.get(token) {
            Some(&id) => id,
            None => {
                let id = self.names.len() as u32;
                self.ids.insert(token.into(), id);
                self.names.push(token.into());
                self.counts.push(0);
                id
            }
        };
        self.counts[id as usize] += 1;
        self.n += 1;
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn count_of(&self, token: &str) -> u64 {
        self.ids
            .get(token)
            .map_or(0, |&id| self.counts[id as usize])
    }

    pub fn id_of(&self, token: &str) -> Option<SymbolId> {
        self.ids.get(token).map(|&id| SymbolId(id.into()))
    }

    /// Interned symbols in id order.
    pub fn vocabulary(&self) -> impl Iterator<Item = &str> {
        self.names.iter().map(|s| &**s)
    }

    pub fn histogram(&self) -> Histogram {
        Histogram::from_dense_counts(&self.counts)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<String> {
        tokenize(s.as_bytes(), &TokenizerConfig::default()).unwrap()
    }

    #[test]
    fn examples() {
        assert_eq!(toks("The the, THE"), ["the", "the", "the"]);
        assert!(toks("").is_empty());
        assert_eq!(toks("a b a c"), ["a", "b", "a", "c"]);
    }

    #[test]
    fn punctuation_only_tokens_are_dropped() {
        assert_eq!(toks("-- hello ... world! '"), ["hello", "world"]);
        assert_eq!(toks("don't\tStop\r\nme-now"), ["dont", "stop", "menow"]);
        assert_eq!(toks("Élan ÉLAN 42"), ["élan", "élan", "42"]);
    }

    #[test]
    fn flags_can_be_disabled() {
        let cfg = TokenizerConfig {
            case_fold: false,
            strip_punctuation: false,
            ..Default::default()
        };
        assert_eq!(tokenize(b"The, the", &cfg).unwrap(), ["The,", "the"]);
    }

    #[test]
    fn invalid_utf8_reports_offset() {
        let bytes = b"ok line\nbad \xff here";
        match tokenize(bytes, &TokenizerConfig::default()) {
            Err(Error::Decode { offset, .. }) => assert_eq!(offset, 12),
            other => panic!("expected decode error, got {other:?}"),
        }
        let cfg = TokenizerConfig {
            encoding: TextEncoding::Latin1,
            ..Default::default()
        };
        assert_eq!(tokenize(b"caf\xe9", &cfg).unwrap(), ["café"]);
    }

    #[test]
    fn paragraphs_split_on_blank_lines() {
        let text = "One two.\nthree\n\n\n  \nFour\n\nfive six";
        let p = read_paragraphs(text.as_bytes(), &TokenizerConfig::default()).unwrap();
        assert_eq!(p, vec![vec!["one", "two", "three"], vec!["four"], vec!["five", "six"]]);
    }

    #[test]
    fn counter_tracks_vocabulary() {
        let c = count_tokens("b a b".as_bytes(), &TokenizerConfig::default()).unwrap();
        assert_eq!(c.n(), 3);
        assert_eq!(c.count_of("b"), 2);
        assert_eq!(c.count_of("zzz"), 0);
        assert_eq!(c.vocabulary().collect::<Vec<_>>(), ["b", "a"]);
        assert_eq!(c.id_of("a"), Some(SymbolId(1)));
    }
}
