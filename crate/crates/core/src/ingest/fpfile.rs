//! Plain-text fingerprint tables.
//!
//! One `j h_j` pair per line (ASCII decimal, whitespace separated), `j` strictly
//! increasing, `h_j >= 1`. Lines starting with `#` are comments. An optional final
//! line `>J T` records `T` types seen more than `J` times without their exact
//! multiplicities.

use std::fmt::Write as _;
use std::fs;
use std::io::{BufRead, BufReader};
use std::path::Path;

use super::{CensoredTail, Fingerprint};
use crate::error::{Error, Result};

pub fn read_fingerprint_file(path: impl AsRef<Path>) -> Result<Fingerprint> {
    let path = path.as_ref();
    let file = fs::File::open(path).map_err(|source| Error::Io {
        path: path.to_owned(),
        source,
    })?;
    parse_fingerprint(BufReader::new(file))
}

pub fn write_fingerprint_file(fp: &Fingerprint, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, render_fingerprint(fp)).map_err(|source| Error::Io {
        path: path.to_owned(),
        source,
    })
}

pub fn render_fingerprint(fp: &Fingerprint) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# n={} distinct={}", fp.n(), fp.distinct());
    for (j, hj) in fp.iter() {
        let _ = writeln!(out, "{j} {hj}");
    }
    if let Some(t) = fp.tail() {
        let _ = writeln!(out, ">{} {}", t.above, t.types);
    }
    out
}

pub fn parse_fingerprint<R: BufRead>(reader: R) -> Result<Fingerprint> {
    let mut pairs: Vec<(u64, u64)> = Vec::new();
    let mut tail: Option<(usize, CensoredTail)> = None;
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| Error::Parse {
            line: lineno,
            message: e.to_string(),
        })?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if tail.is_some() {
            return Err(Error::Parse {
                line: lineno,
                message: "no rows may follow the censored tail row".into(),
            });
        }
        if let Some(rest) = line.strip_prefix('>') {
            let (above, types) = parse_pair(rest, lineno)?;
            tail = Some((lineno, CensoredTail { above, types }));
            continue;
        }
        let (j, hj) = parse_pair(line, lineno)?;
        if j == 0 || hj == 0 {
            return Err(Error::Parse {
                line: lineno,
                message: format!("expected j >= 1 and h_j >= 1, got \"{line}\""),
            });
        }
        if let Some(&(prev, _)) = pairs.last() {
            if j == prev || pairs.iter().any(|&(p, _)| p == j) {
                return Err(Error::DuplicateMultiplicity {
                    line: lineno,
                    multiplicity: j,
                });
            }
            if j < prev {
                return Err(Error::Parse {
                    line: lineno,
                    message: format!("multiplicities must increase ({j} after {prev})"),
                });
            }
        }
        pairs.push((j, hj));
    }
    let fp = Fingerprint::from_pairs(pairs).map_err(|e| Error::Parse {
        line: 0,
        message: e.to_string(),
    })?;
    match tail {
        None => Ok(fp),
        Some((lineno, t)) => fp.with_tail(t).map_err(|e| Error::Parse {
            line: lineno,
            message: e.to_string(),
        }),
    }
}

fn parse_pair(s: &str, line: usize) -> Result<(u64, u64)> {
    let mut fields = s.split_ascii_whitespace();
    let bad = || Error::Parse {
        line,
        message: format!("expected two decimal integers, got \"{s}\""),
    };
    let a = fields.next().ok_or_else(bad)?;
    let b = fields.next().ok_or_else(bad)?;
    if fields.next().is_some() || !is_decimal(a) || !is_decimal(b) {
        return Err(bad());
    }
    Ok((a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?))
}

fn is_decimal(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit())
}
