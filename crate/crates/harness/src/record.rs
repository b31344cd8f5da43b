//! Result rows, the experiment record and its CSV/JSON serialization.
//!
//! Result files hold only values that are a pure function of the spec and seed. Timing and
//! thread counts go to the manifest.

use std::fs;
use std::path::{Path, PathBuf};

use nqa_core::FunctionClass;
use serde::Serialize;

use crate::error::{HarnessError, Result};

/// One `(n, λ, M, class)` cell of a Deutsch–Jozsa experiment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DjRow {
    pub n: usize,
    pub lambda: f64,
    pub shots: usize,
    pub class: FunctionClass,
    pub trials: usize,
    pub successes: usize,
    pub rate: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// Exact success probability where it has a closed form (constant class).
    pub exact: Option<f64>,
    pub seed: u64,
}

/// One measured quantity of a Forrelation cell, in long format.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ForrelationRow {
    pub n: usize,
    pub c1: Option<f64>,
    pub noise: String,
    pub measure: String,
    pub estimate: f64,
    pub standard_error: f64,
    pub expected: Option<f64>,
    /// Instances or samples per label behind the estimate; zero for exact values.
    pub count: usize,
    pub seed: u64,
}

impl ForrelationRow {
    /// `estimate / standard_error`.
    pub fn z_score(&self) -> f64 {
        self.estimate / self.standard_error
    }
}

/// Outcome of one named verification check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRow {
    pub suite: String,
    pub check: String,
    pub measured: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Rows {
    Dj(Vec<DjRow>),
    Forrelation(Vec<ForrelationRow>),
    Verify(Vec<CheckRow>),
}

impl Rows {
    pub fn len(&self) -> usize {
        match self {
            Self::Dj(r) => r.len(),
            Self::Forrelation(r) => r.len(),
            Self::Verify(r) => r.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentRecord {
    /// `dj`, `forrelation`, `verify` or `sweep`.
    pub kind: String,
    pub version: String,
    pub seed: u64,
    pub spec: serde_json::Value,
    pub rows: Rows,
    pub wall_clock_seconds: f64,
    pub total_shots: u64,
    pub threads: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WrittenFiles {
    pub results: PathBuf,
    pub manifest: PathBuf,
}

#[derive(Serialize)]
struct Manifest<'a> {
    kind: &'a str,
    version: &'a str,
    seed: u64,
    spec: &'a serde_json::Value,
    results: String,
    rows: usize,
    wall_clock_seconds: f64,
    total_shots: u64,
    threads: usize,
}

impl ExperimentRecord {
    pub(crate) fn new(kind: &str, seed: u64, spec: &impl Serialize, rows: Rows) -> Result<Self> {
        Ok(Self {
            kind: kind.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed,
            spec: serde_json::to_value(spec)?,
            rows,
            wall_clock_seconds: 0.0,
            total_shots: 0,
            threads: rayon::current_num_threads(),
        })
    }

    /// Whether every verification check passed; experiments always pass.
    pub fn passed(&self) -> bool {
        match &self.rows {
            Rows::Verify(rows) => rows.iter().all(|r| r.passed),
            _ => true,
        }
    }

    pub fn csv_bytes(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        match &self.rows {
            Rows::Dj(rows) => rows.iter().try_for_each(|r| w.serialize(r))?,
            Rows::Forrelation(rows) => rows.iter().try_for_each(|r| w.serialize(r))?,
            Rows::Verify(rows) => rows.iter().try_for_each(|r| w.serialize(r))?,
        }
        w.into_inner()
            .map_err(|e| HarnessError::io("flushing CSV", e.into_error()))
    }

    pub fn json_bytes(&self) -> Result<Vec<u8>> {
        let mut out = serde_json::to_vec_pretty(&self.rows)?;
        out.push(b'\n');
        Ok(out)
    }

    /// Writes `<kind>.csv` or `<kind>.json` and `<kind>.manifest.json` into `dir`.
    pub fn write(&self, dir: &Path, format: Format) -> Result<WrittenFiles> {
        fs::create_dir_all(dir)
            .map_err(|e| HarnessError::io(format!("creating {}", dir.display()), e))?;
        let (name, bytes) = match format {
            Format::Csv => (format!("{}.csv", self.kind), self.csv_bytes()?),
            Format::Json => (format!("{}.json", self.kind), self.json_bytes()?),
        };
        let results = dir.join(&name);
        fs::write(&results, bytes)
            .map_err(|e| HarnessError::io(format!("writing {}", results.display()), e))?;
        let manifest = Manifest {
            kind: &self.kind,
            version: &self.version,
            seed: self.seed,
            spec: &self.spec,
            results: name,
            rows: self.rows.len(),
            wall_clock_seconds: self.wall_clock_seconds,
            total_shots: self.total_shots,
            threads: self.threads,
        };
        let manifest_path = dir.join(format!("{}.manifest.json", self.kind));
        let mut text = serde_json::to_vec_pretty(&manifest)?;
        text.push(b'\n');
        fs::write(&manifest_path, text)
            .map_err(|e| HarnessError::io(format!("writing {}", manifest_path.display()), e))?;
        Ok(WrittenFiles {
            results,
            manifest: manifest_path,
        })
    }
}
