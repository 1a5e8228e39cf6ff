//! CSV helpers shared by the subcommands.

use std::path::Path;

use crate::error::{CliError, Result};

pub fn write_csv(path: &Path, header: &[String], rows: &[Vec<String>]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

pub fn num(v: f64) -> String {
    v.to_string()
}

/// A numeric CSV file with a header row.
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn read(path: &Path) -> Result<Self> {
        let mut r = csv::Reader::from_path(path).map_err(|e| match e.into_kind() {
            csv::ErrorKind::Io(io) => CliError::io(path, io),
            other => CliError::Config(format!("{}: {other:?}", path.display())),
        })?;
        let at = |e: csv::Error| match e.into_kind() {
            csv::ErrorKind::Io(io) => CliError::io(path, io),
            other => CliError::Config(format!("{}: {other:?}", path.display())),
        };
        let header: Vec<String> = r.headers().map_err(at)?.iter().map(str::to_string).collect();
        let mut rows = Vec::new();
        for (i, rec) in r.records().enumerate() {
            let rec = rec.map_err(at)?;
            let row = rec
                .iter()
                .map(|s| s.trim().parse::<f64>().unwrap_or(f64::NAN))
                .collect::<Vec<_>>();
            if row.len() != header.len() {
                return Err(CliError::Config(format!("{} row {}: expected {} fields", path.display(), i + 2, header.len())));
            }
            rows.push(row);
        }
        Ok(Self { header, rows })
    }

    pub fn column(&self, name: &str) -> Result<Vec<f64>> {
        let j = self
            .header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| CliError::Config(format!("missing column {name:?}; have {}", self.header.join(","))))?;
        Ok(self.rows.iter().map(|r| r[j]).collect())
    }

    pub fn columns_with_prefix(&self, prefix: &str) -> Vec<String> {
        self.header.iter().filter(|h| h.starts_with(prefix)).cloned().collect()
    }
}
