//! Deterministic CSV and JSON emission with atomic file replacement.

use std::io::Write;
use std::path::Path;

use serde::Serialize;

use super::config::SCHEMA_VERSION;
use super::LabError;

/// First line of every CSV file.
pub fn schema_line() -> String {
    format!("# gridgas-schema: {SCHEMA_VERSION}")
}

/// An in-memory table; values are preformatted strings.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CsvTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn new(header: &[&str]) -> Self {
        CsvTable {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>, LabError> {
        let mut out = Vec::new();
        writeln!(out, "{}", schema_line()).expect("write to memory");
        {
            let mut w = csv::Writer::from_writer(&mut out);
            w.write_record(&self.header)?;
            for r in &self.rows {
                w.write_record(r)?;
            }
            w.flush().map_err(|e| LabError::Io {
                path: "<memory>".into(),
                source: e,
            })?;
        }
        Ok(out)
    }
}

/// Shortest round-trip decimal form.
pub fn fmt_f64(x: f64) -> String {
    if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.to_string()
    } else {
        format!("{x}")
    }
}

/// Writes to a sibling temporary file, then renames over the target.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), LabError> {
    let io = |e: std::io::Error| LabError::Io {
        path: path.display().to_string(),
        source: e,
    };
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(io)?;
    }
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = path.with_file_name(format!(".{name}.tmp{}", std::process::id()));
    let result = std::fs::File::create(&tmp)
        .and_then(|mut f| {
            f.write_all(bytes)?;
            f.sync_all()
        })
        .and_then(|_| std::fs::rename(&tmp, path));
    if result.is_err() {
        let _ = std::fs::remove_file(&tmp);
    }
    result.map_err(io)
}

pub fn write_csv(path: &Path, table: &CsvTable) -> Result<(), LabError> {
    write_atomic(path, &table.to_bytes()?)
}

pub fn json_bytes<T: Serialize>(value: &T) -> Result<Vec<u8>, LabError> {
    let mut v = serde_json::to_vec_pretty(value)?;
    v.push(b'\n');
    Ok(v)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), LabError> {
    write_atomic(path, &json_bytes(value)?)
}
