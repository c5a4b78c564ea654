//! Report writers: JSON, CSV and binary PGM. Files are written to a sibling
//! temporary file and renamed into place.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::dynamics::{BasinGrid, CODE_ESCAPING, CODE_ORIGIN, CODE_PERIODIC, CODE_UNDECIDED};
use crate::error::Result;

/// Gray level for each basin code.
pub fn gray_level(code: u8) -> u8 {
    match code {
        CODE_ORIGIN => 255,
        CODE_PERIODIC => 170,
        CODE_ESCAPING => 85,
        CODE_UNDECIDED => 0,
        _ => 0,
    }
}

fn temp_path(path: &Path) -> PathBuf {
    let mut name = path
        .file_name()
        .map(|n| n.to_os_string())
        .unwrap_or_default();
    name.push(format!(".tmp-{}", std::process::id()));
    path.with_file_name(name)
}

/// Writes `bytes` to `path` atomically (temp file + rename).
pub fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let tmp = temp_path(path);
    let result = (|| {
        let mut file = fs::File::create(&tmp)?;
        file.write_all(bytes)?;
        file.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result
}

pub fn pgm_bytes(grid: &BasinGrid) -> Vec<u8> {
    let header = format!("P5\n{} {}\n255\n", grid.width, grid.height);
    let mut out = Vec::with_capacity(header.len() + grid.cells.len());
    out.extend_from_slice(header.as_bytes());
    out.extend(grid.cells.iter().map(|&c| gray_level(c)));
    out
}

pub fn emit_pgm(grid: &BasinGrid, path: &Path) -> Result<()> {
    Ok(write_atomic(path, &pgm_bytes(grid))?)
}

/// Pretty JSON; key order follows struct field order.
pub fn json_string<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

pub fn emit_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    Ok(write_atomic(path, json_string(value)?.as_bytes())?)
}

/// 17 significant digits; parses back to the same double.
pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

/// A CSV table held in memory until written.
#[derive(Debug, Clone, Default)]
pub struct CsvTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push_floats(&mut self, values: &[f64]) {
        self.rows
            .push(values.iter().map(|&v| format_float(v)).collect());
    }

    pub fn push_row(&mut self, fields: Vec<String>) {
        self.rows.push(fields);
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).map_err(io::Error::from)?;
        for row in &self.rows {
            w.write_record(row).map_err(io::Error::from)?;
        }
        Ok(w.into_inner().map_err(|e| e.into_error())?)
    }
}

pub fn emit_csv(table: &CsvTable, path: &Path) -> Result<()> {
    Ok(write_atomic(path, &table.to_bytes()?)?)
}
