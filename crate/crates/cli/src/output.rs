//! CSV tables and JSON summaries.
//!
//! Floats go through the shortest representation that parses back to the
//! same value, so the files are exact and byte-stable.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use rankone::dispersion::PointSet;
use serde::Serialize;

use crate::CliError;

/// A CSV row type with a fixed header.
pub trait Row: Serialize {
    const COLUMNS: &'static [&'static str];
}

/// Writes the header and then every row. An empty slice yields the header alone.
pub fn write_table<R: Row, W: Write>(out: W, rows: &[R]) -> Result<(), CliError> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(R::COLUMNS)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_table_file<R: Row>(path: &Path, rows: &[R]) -> Result<(), CliError> {
    write_table(BufWriter::new(File::create(path)?), rows)
}

pub fn write_json_file<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String, CliError> {
    Ok(serde_json::to_string_pretty(value)?)
}

/// Reads one point per row; every row must have the same number of columns.
pub fn read_points(path: &Path) -> Result<PointSet, CliError> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .from_path(path)?;
    let mut points = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec?;
        let p = rec
            .iter()
            .map(|s| s.trim().parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| CliError::config(format!("{} row {}: {e}", path.display(), line + 1)))?;
        points.push(p);
    }
    let d = points.first().map_or(0, Vec::len);
    if d == 0 {
        return Err(CliError::config(format!("{}: no points", path.display())));
    }
    Ok(PointSet::new(d, points)?)
}

pub fn write_points<W: Write>(out: W, ps: &PointSet) -> Result<(), CliError> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    for p in ps.points() {
        w.serialize(p)?;
    }
    w.flush()?;
    Ok(())
}
