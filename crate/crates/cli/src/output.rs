//! CSV and JSON sinks.

use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde_json::Value;

use crate::CliError;

/// CSV writer to a file, or to stdout when no path is given.
pub fn csv_writer(path: Option<&Path>) -> Result<csv::Writer<Box<dyn Write>>, CliError> {
    let sink: Box<dyn Write> = match path {
        Some(p) => Box::new(File::create(p).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?),
        None => Box::new(io::stdout().lock()),
    };
    Ok(csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(sink))
}

/// Writes rows of already formatted cells under `header`.
pub fn write_csv(path: Option<&Path>, header: &[&str], rows: &[Vec<String>]) -> Result<(), CliError> {
    let mut w = csv_writer(path)?;
    w.write_record(header).map_err(csv_err)?;
    for row in rows {
        w.write_record(row).map_err(csv_err)?;
    }
    w.flush().map_err(|e| CliError::Io(e.to_string()))
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::Io(e.to_string())
}

/// Shortest round-trip decimal; the same value always prints the same way.
pub fn num(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v:?}")
    }
}

/// Where the JSON summary goes: an explicit path, next to the CSV, or stderr.
pub fn summary_path(explicit: Option<&Path>, csv: Option<&Path>) -> Option<PathBuf> {
    explicit.map(Path::to_path_buf).or_else(|| csv.map(|p| p.with_extension("json")))
}

pub fn write_summary(path: Option<&Path>, summary: &Value) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(summary).map_err(|e| CliError::Io(e.to_string()))? + "\n";
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
        None => io::stderr().write_all(text.as_bytes()).map_err(|e| CliError::Io(e.to_string())),
    }
}
