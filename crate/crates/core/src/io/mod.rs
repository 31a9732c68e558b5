//! Text formats for networks, demand, and results, plus the binary cache
//! for preprocessing artifacts.
//!
//! Every CSV starts with the version header line, then a column header. The
//! formats are a bit-exact contract: loading a dump reproduces the dump byte
//! for byte, and all numeric output uses fixed, locale-free formatting.

pub mod cache;
pub mod config;
pub mod demand;
pub mod geojson;
pub mod network_io;
pub mod results;

use std::fmt;
use std::path::{Path, PathBuf};

/// First line of every text artifact this crate reads or writes.
pub const VERSION_HEADER: &str = "#transit-assign v1";

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    File {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{file}:{line}: expected version header '{VERSION_HEADER}'")]
    MissingHeader { file: PathBuf, line: usize },
    #[error("{file}:{line}: column {column}: {message}")]
    Field {
        file: PathBuf,
        line: usize,
        /// 1-based CSV column.
        column: usize,
        message: String,
    },
    #[error("{file}:{line}: {message}")]
    Row {
        file: PathBuf,
        line: usize,
        message: String,
    },
    #[error("network validation failed: {0}")]
    InvalidNetwork(String),
    #[error("{file}: {source}")]
    Config {
        file: PathBuf,
        #[source]
        source: Box<toml::de::Error>,
    },
    #[error("config: {0}")]
    ConfigValue(String),
    #[error("cache {path}: {message}")]
    Cache { path: PathBuf, message: String },
}

impl IoError {
    fn file(path: &Path, source: std::io::Error) -> IoError {
        IoError::File {
            path: path.to_path_buf(),
            source,
        }
    }
}

/// One parsed CSV data row, carrying its provenance for error messages.
struct Row<'a> {
    file: &'a Path,
    line: usize,
    fields: Vec<&'a str>,
}

impl<'a> Row<'a> {
    fn field_error(&self, column: usize, message: impl fmt::Display) -> IoError {
        IoError::Field {
            file: self.file.to_path_buf(),
            line: self.line,
            column,
            message: message.to_string(),
        }
    }

    fn error(&self, message: impl fmt::Display) -> IoError {
        IoError::Row {
            file: self.file.to_path_buf(),
            line: self.line,
            message: message.to_string(),
        }
    }

    fn expect_len(&self, expected: usize) -> Result<(), IoError> {
        if self.fields.len() == expected {
            Ok(())
        } else {
            Err(self.error(format_args!(
                "expected {expected} fields, found {}",
                self.fields.len()
            )))
        }
    }

    fn get(&self, column: usize) -> &'a str {
        self.fields[column - 1]
    }

    /// Unsigned integer field.
    fn u32(&self, column: usize) -> Result<u32, IoError> {
        self.get(column)
            .parse::<u32>()
            .map_err(|e| self.field_error(column, format_args!("'{}': {e}", self.get(column))))
    }

    fn f64(&self, column: usize) -> Result<f64, IoError> {
        self.get(column)
            .parse::<f64>()
            .map_err(|e| self.field_error(column, format_args!("'{}': {e}", self.get(column))))
    }

    /// Timestamp field in `HH:MM:SS` with unbounded hours.
    fn time(&self, column: usize) -> Result<crate::network::Time, IoError> {
        parse_time(self.get(column))
            .map(crate::network::Time)
            .map_err(|msg| {
                self.field_error(column, format_args!("'{}': {msg}", self.get(column)))
            })
    }
}

/// Parses `HH:MM:SS` into seconds. Hours may exceed 24 for services running
/// past midnight; minutes and seconds must stay below 60.
fn parse_time(text: &str) -> Result<u32, &'static str> {
    let mut parts = text.split(':');
    let (Some(h), Some(m), Some(s), None) = (parts.next(), parts.next(), parts.next(), parts.next())
    else {
        return Err("expected HH:MM:SS");
    };
    let h: u32 = h.parse().map_err(|_| "bad hour")?;
    let m: u32 = m.parse().map_err(|_| "bad minute")?;
    let s: u32 = s.parse().map_err(|_| "bad second")?;
    if m >= 60 {
        return Err("minute out of range");
    }
    if s >= 60 {
        return Err("second out of range");
    }
    h.checked_mul(3600)
        .and_then(|v| v.checked_add(m * 60 + s))
        .ok_or("timestamp overflow")
}

fn format_time(t: crate::network::Time) -> String {
    t.to_string()
}

/// Reads a CSV file: version header, column header, then data rows. Blank
/// lines are ignored; additional `#`-prefixed lines after the version header
/// are handed to `directive`.
fn read_csv<T>(
    path: &Path,
    expect_columns: &str,
    mut directive: impl FnMut(&str, usize) -> Result<(), IoError>,
    mut row: impl FnMut(&Row<'_>) -> Result<T, IoError>,
) -> Result<Vec<T>, IoError> {
    let text = std::fs::read_to_string(path).map_err(|e| IoError::file(path, e))?;
    let mut out = Vec::new();
    let mut saw_version = false;
    let mut saw_columns = false;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim_end_matches('\r');
        if trimmed.is_empty() {
            continue;
        }
        if !saw_version {
            if trimmed != VERSION_HEADER {
                return Err(IoError::MissingHeader {
                    file: path.to_path_buf(),
                    line,
                });
            }
            saw_version = true;
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix('#') {
            directive(rest, line)?;
            continue;
        }
        if !saw_columns {
            if trimmed != expect_columns {
                return Err(IoError::Row {
                    file: path.to_path_buf(),
                    line,
                    message: format!("expected column header '{expect_columns}', found '{trimmed}'"),
                });
            }
            saw_columns = true;
            continue;
        }
        let parsed = Row {
            file: path,
            line,
            fields: trimmed.split(',').collect(),
        };
        out.push(row(&parsed)?);
    }
    if !saw_version {
        return Err(IoError::MissingHeader {
            file: path.to_path_buf(),
            line: 1,
        });
    }
    Ok(out)
}

fn write_file(path: &Path, content: &str) -> Result<(), IoError> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(|e| IoError::file(parent, e))?;
    }
    std::fs::write(path, content).map_err(|e| IoError::file(path, e))
}

/// Fixed six-decimal fraction `units / denominator`, rounded half to even.
/// Exact integer arithmetic so output never depends on float formatting.
fn fixed6(units: u64, denominator: u64) -> String {
    debug_assert!(denominator > 0);
    let scaled = units as u128 * 1_000_000;
    let den = denominator as u128;
    let mut q = scaled / den;
    let r = scaled % den;
    let twice = r * 2;
    if twice > den || (twice == den && q % 2 == 1) {
        q += 1;
    }
    format!("{}.{:06}", q / 1_000_000, q % 1_000_000)
}
