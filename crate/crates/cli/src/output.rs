//! Tabular data files and the per-run manifest.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use curlforce_core::state::{EventRecord, StepStats, Termination};
use curlforce_core::{InvariantReport, Trajectory};
use serde::Serialize;
use serde_json::Value;

use crate::config::RunConfig;
use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
}

impl Cell {
    fn csv(self, out: &mut String) {
        // 17 significant digits round-trip every f64
        match self {
            Cell::Int(i) => write!(out, "{i}").unwrap(),
            Cell::Float(x) => write!(out, "{x:.16e}").unwrap(),
        }
    }

    fn json(self) -> Value {
        match self {
            Cell::Int(i) => Value::from(i),
            Cell::Float(x) if x.is_finite() => Value::from(x),
            Cell::Float(x) => Value::from(format!("{x}")),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<usize> for Cell {
    fn from(i: usize) -> Self {
        Cell::Int(i as i64)
    }
}

#[derive(Debug, Clone)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            for (i, c) in row.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                c.csv(&mut out);
            }
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| Value::Array(r.iter().map(|c| c.json()).collect()))
            .collect();
        let doc = serde_json::json!({ "columns": self.columns, "rows": rows });
        let mut text = serde_json::to_string_pretty(&doc).unwrap();
        text.push('\n');
        text
    }

    /// Writes `<dir>/<stem>.<ext>` and returns the file name.
    pub fn write(&self, dir: &Path, stem: &str, format: Format) -> Result<String> {
        let name = format!("{stem}.{}", format.extension());
        let text = match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        };
        write_file(&dir.join(&name), &text)?;
        Ok(name)
    }
}

pub fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|source| CliError::Write {
        path: path.to_path_buf(),
        source,
    })
}

pub fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|source| CliError::Write {
        path: dir.to_path_buf(),
        source,
    })
}

/// Pretty JSON with keys in sorted order and a trailing newline.
pub fn to_sorted_json<T: Serialize>(value: &T) -> String {
    // Value maps are ordered, so converting first sorts every object
    let v = serde_json::to_value(value).expect("serializable report");
    let mut text = serde_json::to_string_pretty(&v).unwrap();
    text.push('\n');
    text
}

/// Summary of one integration.
#[derive(Debug, Clone, Serialize)]
pub struct RunRecord {
    pub label: String,
    pub system: String,
    pub termination: Termination,
    pub stats: StepStats,
    pub events: Vec<EventRecord>,
    pub t_start: f64,
    pub t_end: f64,
    pub samples: usize,
}

impl RunRecord {
    pub fn new(label: impl Into<String>, traj: &Trajectory) -> Self {
        let (t_start, t_end) = traj.t_span();
        Self {
            label: label.into(),
            system: traj.meta.system.clone(),
            termination: traj.meta.termination,
            stats: traj.meta.stats.clone(),
            events: traj.events.clone(),
            t_start,
            t_end,
            samples: traj.len(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DriftRecord {
    pub name: String,
    pub initial: f64,
    pub drift: f64,
}

impl From<&InvariantReport> for DriftRecord {
    fn from(r: &InvariantReport) -> Self {
        Self {
            name: r.name.clone(),
            initial: r.values[0],
            drift: r.drift,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Effective {
    pub variant: String,
    pub format: Format,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_steps_override: Option<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub config: RunConfig,
    pub effective: Effective,
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub outputs: Vec<String>,
    pub runs: Vec<RunRecord>,
    pub invariants: Vec<DriftRecord>,
    pub reports: BTreeMap<String, Value>,
    pub discrepancies: Vec<String>,
}

impl Manifest {
    pub fn new(command: &str, config: RunConfig, effective: Effective) -> Self {
        Self {
            tool: "curlforce",
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            config,
            effective,
            status: "ok".into(),
            error: None,
            outputs: Vec::new(),
            runs: Vec::new(),
            invariants: Vec::new(),
            reports: BTreeMap::new(),
            discrepancies: Vec::new(),
        }
    }

    pub fn report<T: Serialize>(&mut self, key: &str, value: &T) {
        let v = serde_json::to_value(value).expect("serializable report");
        self.reports.insert(key.to_string(), v);
    }

    pub fn write(&self, dir: &Path) -> Result<PathBuf> {
        let path = dir.join("manifest.json");
        write_file(&path, &to_sorted_json(self))?;
        Ok(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trips_floats() {
        let mut t = Table::new(["i", "x"]);
        let x = 0.1f64 + 0.2;
        t.push(vec![Cell::Int(3), Cell::Float(x)]);
        let text = t.to_csv();
        let line = text.lines().nth(1).unwrap();
        let parsed: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
        assert_eq!(parsed, x);
        assert!(text.ends_with('\n') && !text.contains('\r'));
        assert!(line.starts_with("3,"));
    }

    #[test]
    fn sorted_keys() {
        let mut m = BTreeMap::new();
        m.insert("b", 1);
        m.insert("a", 2);
        let text = to_sorted_json(&serde_json::json!({"z": 1, "a": m}));
        assert!(text.find("\"a\"").unwrap() < text.find("\"z\"").unwrap());
    }
}
