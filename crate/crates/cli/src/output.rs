use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use serde::Serialize;

use crate::args::Format;
use crate::error::CliError;

/// Where results go: a file when `--out` is given, standard output otherwise.
pub fn sink(out: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    Ok(match out {
        Some(path) => Box::new(
            File::create(path).map_err(|e| CliError::Write(path.display().to_string(), e))?,
        ),
        None => Box::new(io::stdout().lock()),
    })
}

/// Writes flat rows with a header line.
pub fn write_csv<T: Serialize>(w: impl Write, rows: &[T]) -> Result<(), CliError> {
    let mut writer = csv::Writer::from_writer(w);
    for row in rows {
        writer.serialize(row)?;
    }
    writer
        .flush()
        .map_err(|e| CliError::Write("output".into(), e))?;
    Ok(())
}

pub fn write_json<T: Serialize + ?Sized>(mut w: impl Write, value: &T) -> Result<(), CliError> {
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w).map_err(|e| CliError::Write("output".into(), e))?;
    Ok(())
}

/// Table commands: the same rows as CSV or as a JSON array.
pub fn write_rows<T: Serialize>(
    out: Option<&Path>,
    format: Option<Format>,
    rows: &[T],
) -> Result<(), CliError> {
    let w = sink(out)?;
    match format.unwrap_or(Format::Csv) {
        Format::Csv => write_csv(w, rows),
        Format::Json => write_json(w, rows),
    }
}

/// Report commands: full JSON, or flat summary rows as CSV.
pub fn write_report<T: Serialize + ?Sized, R: Serialize>(
    out: Option<&Path>,
    format: Option<Format>,
    report: &T,
    summary: &[R],
) -> Result<(), CliError> {
    let w = sink(out)?;
    match format.unwrap_or(Format::Json) {
        Format::Csv => write_csv(w, summary),
        Format::Json => write_json(w, report),
    }
}

/// `"3"` for a single value, `"1;2"` for a tie.
pub fn join(ks: &[usize]) -> String {
    ks.iter()
        .map(usize::to_string)
        .collect::<Vec<_>>()
        .join(";")
}
