//! File output: CSV tables and run manifests.

use std::fs;
use std::path::{Path, PathBuf};

use rotor_gpe::{GpeError, Result};
use serde::Serialize;

use crate::config::RunConfig;

pub fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| GpeError::io(dir, e))
}

/// Writes `header` and `rows`, one line each, newline-terminated.
pub fn write_csv<I>(path: &Path, header: &str, rows: I) -> Result<()>
where
    I: IntoIterator<Item = String>,
{
    let mut text = String::from(header);
    text.push('\n');
    for row in rows {
        text.push_str(&row);
        text.push('\n');
    }
    fs::write(path, text).map_err(|e| GpeError::io(path, e))
}

/// Round-trip exact decimal for CSV cells.
pub fn cell(x: f64) -> String {
    format!("{x:.16e}")
}

/// Reproduction record written next to every output set.
#[derive(Debug, Serialize)]
pub struct Manifest<'a> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub config: &'a RunConfig,
    pub outputs: Vec<PathBuf>,
    pub wall_time_s: f64,
    pub summary: serde_json::Value,
}

impl<'a> Manifest<'a> {
    pub fn new(command: impl Into<String>, config: &'a RunConfig) -> Self {
        Manifest {
            tool: "rotor-gpe",
            version: env!("CARGO_PKG_VERSION"),
            command: command.into(),
            config,
            outputs: Vec::new(),
            wall_time_s: 0.0,
            summary: serde_json::Value::Null,
        }
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self).expect("manifest serializes");
        fs::write(path, text + "\n").map_err(|e| GpeError::io(path, e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cells_round_trip() {
        for x in [0.1, -1.0 / 3.0, 1e-300, 6.02e23, 0.0] {
            assert_eq!(cell(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn csv_layout() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("a.csv");
        write_csv(&p, "a,b", ["1,2".to_string()]).unwrap();
        assert_eq!(fs::read_to_string(&p).unwrap(), "a,b\n1,2\n");
        write_csv(&p, "a,b", Vec::new()).unwrap();
        assert_eq!(fs::read_to_string(&p).unwrap(), "a,b\n");
    }
}
