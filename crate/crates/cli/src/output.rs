use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::{json, Value};
use shiftdyn_core::ShiftError;

use crate::args::{Cli, Format};

#[derive(Debug)]
pub enum CliError {
    Validation(String),
    Numeric(String),
    Io(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation(m) => write!(f, "invalid input: {m}"),
            CliError::Numeric(m) => write!(f, "numeric failure: {m}"),
            CliError::Io(m) => write!(f, "{m}"),
        }
    }
}

impl From<ShiftError> for CliError {
    fn from(e: ShiftError) -> Self {
        if e.is_numeric() {
            CliError::Numeric(e.to_string())
        } else {
            CliError::Validation(e.to_string())
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// A plot series: header plus one row per strictly increasing index.
pub struct Series {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Series {
    pub fn new(header: Vec<&'static str>) -> Self {
        Series { header, rows: Vec::new() }
    }

    pub fn push<I: IntoIterator<Item = String>>(&mut self, row: I) {
        self.rows.push(row.into_iter().collect());
    }

    fn to_csv(&self) -> CliResult<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let io = |e: csv::Error| CliError::Io(format!("csv: {e}"));
        w.write_record(&self.header).map_err(io)?;
        for r in &self.rows {
            w.write_record(r).map_err(io)?;
        }
        w.into_inner().map_err(|e| CliError::Io(format!("csv: {e}")))
    }
}

/// Number formatting for CSV cells: shortest round-trip, `-inf` spelled out.
pub fn num(x: f64) -> String {
    if x == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        x.to_string()
    }
}

pub struct CommandOutput {
    pub result: Value,
    pub series: Option<Series>,
}

pub fn to_value<T: Serialize>(x: &T) -> CliResult<Value> {
    serde_json::to_value(x).map_err(|e| CliError::Io(format!("serialize: {e}")))
}

pub struct Emitter<'a> {
    cli: &'a Cli,
}

impl<'a> Emitter<'a> {
    pub fn new(cli: &'a Cli) -> Self {
        Emitter { cli }
    }

    pub fn emit(&self, out: &CommandOutput, wall_time: f64) -> CliResult<()> {
        let json_bytes = || -> CliResult<Vec<u8>> {
            let mut b = serde_json::to_vec_pretty(&out.result).map_err(|e| CliError::Io(e.to_string()))?;
            b.push(b'\n');
            Ok(b)
        };
        let csv_bytes = || -> CliResult<Vec<u8>> {
            match &out.series {
                Some(s) => s.to_csv(),
                None => Err(CliError::Validation("this command has no CSV series".into())),
            }
        };
        let stdout = |bytes: Vec<u8>| -> CliResult<()> {
            std::io::stdout()
                .write_all(&bytes)
                .map_err(|e| CliError::Io(format!("stdout: {e}")))
        };

        match self.cli.out.as_deref() {
            None | Some("json") => stdout(json_bytes()?),
            Some("csv") => stdout(csv_bytes()?),
            Some(path) => {
                let path = PathBuf::from(path);
                let format = self.cli.format.unwrap_or_else(|| {
                    match path.extension().and_then(|e| e.to_str()) {
                        Some("csv") => Format::Csv,
                        _ => Format::Json,
                    }
                });
                match format {
                    Format::Json => {
                        write_file(&path, &json_bytes()?)?;
                        if out.series.is_some() {
                            write_file(&sibling(&path, "series.csv"), &csv_bytes()?)?;
                        }
                    }
                    Format::Csv => write_file(&path, &csv_bytes()?)?,
                }
                let manifest = self.manifest(wall_time)?;
                let mut b = serde_json::to_vec_pretty(&manifest).map_err(|e| CliError::Io(e.to_string()))?;
                b.push(b'\n');
                write_file(&sibling(&path, "manifest.json"), &b)?;
                log::info!("wrote {}", path.display());
                Ok(())
            }
        }
    }

    fn manifest(&self, wall_time: f64) -> CliResult<Value> {
        let timestamp = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        Ok(json!({
            "tool": "shiftdyn",
            "version": env!("CARGO_PKG_VERSION"),
            "inputs": to_value(self.cli)?,
            "seed": self.cli.seed,
            "wall_time_s": wall_time,
            "timestamp": timestamp,
        }))
    }
}

/// `dir/name.json` -> `dir/name.<suffix>`.
fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("out");
    path.with_file_name(format!("{stem}.{suffix}"))
}

fn write_file(path: &Path, bytes: &[u8]) -> CliResult<()> {
    fs::write(path, bytes).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}
