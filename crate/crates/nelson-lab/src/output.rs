//! In-memory CSV tables with mandatory headers.

use std::fs;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::error::{LabError, Result};

/// One CSV file: a header row and string-formatted cells.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub file: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(file: &str, header: &[&str]) -> Self {
        Table { file: file.to_string(), header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    /// Parse one column as floats; empty cells become NaN.
    pub fn floats(&self, name: &str) -> Vec<f64> {
        let c = self.column(name).unwrap_or_else(|| panic!("no column {name} in {}", self.file));
        self.rows.iter().map(|r| r[c].parse().unwrap_or(f64::NAN)).collect()
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.into_inner().map_err(|e| LabError::Config(e.to_string()))
    }

    /// Write into `dir`, returning the SHA-256 of the bytes written.
    pub fn write(&self, dir: &Path) -> Result<String> {
        let bytes = self.to_bytes()?;
        let path = dir.join(&self.file);
        fs::write(&path, &bytes).map_err(|e| LabError::io(&path, e))?;
        Ok(sha256_hex(&bytes))
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    format!("{:x}", Sha256::digest(bytes))
}

/// Shortest round-trip form, exponent notation for very small or large
/// magnitudes; deterministic across runs.
pub fn num(v: f64) -> String {
    format!("{v:?}")
}

pub fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}
