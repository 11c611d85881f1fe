//! CSV and JSON-lines emission. Floats are written in shortest round-trip form, so
//! parsing an emitted file gives back the same values.

use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{CliError, CliResult};

/// A flat record with a fixed column order.
pub trait CsvRecord: Serialize {
    const HEADER: &'static [&'static str];
}

/// Writes the header and then one line per row; an empty slice gives a header-only file.
pub fn emit_csv<R: CsvRecord, W: Write>(rows: &[R], out: W) -> CliResult<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(R::HEADER)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn read_csv<R: DeserializeOwned, Rd: Read>(input: Rd) -> CliResult<Vec<R>> {
    let mut r = csv::Reader::from_reader(input);
    r.deserialize().map(|row| row.map_err(CliError::from)).collect()
}

/// One JSON object per line.
pub fn emit_json<R: Serialize, W: Write>(records: &[R], mut out: W) -> CliResult<()> {
    for rec in records {
        serde_json::to_writer(&mut out, rec)?;
        out.write_all(b"\n").map_err(|e| CliError::Json(serde_json::Error::io(e)))?;
    }
    out.flush().map_err(|e| CliError::Json(serde_json::Error::io(e)))?;
    Ok(())
}

pub fn read_json_lines<R: DeserializeOwned, Rd: Read>(input: Rd) -> CliResult<Vec<R>> {
    serde_json::Deserializer::from_reader(input)
        .into_iter::<R>()
        .map(|r| r.map_err(CliError::from))
        .collect()
}

/// Standard output, or a freshly created file.
pub fn open_output(path: Option<&Path>) -> CliResult<Box<dyn Write>> {
    match path {
        None => Ok(Box::new(BufWriter::new(io::stdout().lock()))),
        Some(p) => {
            let f = File::create(p).map_err(|source| CliError::Io {
                path: p.to_path_buf(),
                source,
            })?;
            Ok(Box::new(BufWriter::new(f)))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde::Deserialize;

    #[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
    struct Row {
        name: String,
        value: f64,
        maybe: Option<f64>,
    }

    impl CsvRecord for Row {
        const HEADER: &'static [&'static str] = &["name", "value", "maybe"];
    }

    fn rows() -> Vec<Row> {
        vec![
            Row {
                name: "a".into(),
                value: 0.1 + 0.2,
                maybe: None,
            },
            Row {
                name: "b,c".into(),
                value: 1e-300 / 3.0,
                maybe: Some(-2.5e17),
            },
        ]
    }

    #[test]
    fn empty_csv_has_only_the_header() {
        let mut buf = Vec::new();
        emit_csv::<Row, _>(&[], &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "name,value,maybe\n");
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let mut buf = Vec::new();
        emit_csv(&rows(), &mut buf).unwrap();
        let back: Vec<Row> = read_csv(&buf[..]).unwrap();
        assert_eq!(back, rows());
    }

    #[test]
    fn json_round_trip_is_exact() {
        let mut buf = Vec::new();
        emit_json(&rows(), &mut buf).unwrap();
        assert_eq!(String::from_utf8_lossy(&buf).lines().count(), 2);
        let back: Vec<Row> = read_json_lines(&buf[..]).unwrap();
        assert_eq!(back, rows());
    }
}
