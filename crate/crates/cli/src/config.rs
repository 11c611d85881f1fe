//! Optional configuration file: one `key = value` per line, `#` comments. Keys are
//! flag names with or without the leading dashes (`trials = 100`, `--seed=7`).

use std::path::Path;

use crate::error::{CliError, CliResult};

pub fn parse_config(text: &str, origin: &str) -> CliResult<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| CliError::Config {
            path: origin.to_string(),
            line: idx + 1,
            message: format!("expected key=value, got \"{line}\""),
        })?;
        let key = key.trim().trim_start_matches('-').replace('_', "-");
        if key.is_empty() {
            return Err(CliError::Config {
                path: origin.to_string(),
                line: idx + 1,
                message: "empty key".into(),
            });
        }
        out.push((key, value.trim().to_string()));
    }
    Ok(out)
}

pub fn read_config(path: &Path) -> CliResult<Vec<(String, String)>> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config(&text, &path.display().to_string())
}
