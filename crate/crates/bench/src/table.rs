//! CSV output: `#` metadata lines, one header row, then data rows.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{BenchError, Result};

pub const BUILD_ID: &str = env!("FFIA_BENCH_BUILD_ID");

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
    /// Extra `#` lines written after the metadata line.
    pub notes: Vec<String>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Self {
            header: header.to_vec(),
            rows: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| *h == name)
    }

    pub fn write(&self, path: &Path, metadata: &str) -> Result<()> {
        let io = |source| BenchError::Io {
            path: path.to_path_buf(),
            source,
        };
        let mut out = BufWriter::new(File::create(path).map_err(io)?);
        writeln!(out, "# ffia-bench build={BUILD_ID} {metadata}").map_err(io)?;
        for note in &self.notes {
            writeln!(out, "# {note}").map_err(io)?;
        }
        let mut writer = csv::Writer::from_writer(out);
        let csv_err = |source| BenchError::Csv {
            path: path.to_path_buf(),
            source,
        };
        writer.write_record(&self.header).map_err(csv_err)?;
        for row in &self.rows {
            writer.write_record(row).map_err(csv_err)?;
        }
        writer.flush().map_err(io)?;
        Ok(())
    }
}

/// Shortest round-trip form, so equal values always print identically.
pub fn real(x: f64) -> String {
    format!("{x:e}")
}
