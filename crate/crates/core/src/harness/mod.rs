//! Experiment orchestration: config in, report and plot tables out.

pub mod config;
mod experiments;

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

use crate::error::Result;
use crate::gauge::{certify, ConvexityCertificate};
use crate::induced::EmbeddedSphere;
pub use config::{Experiment, ExperimentConfig, Format, NormSpec};

pub const TOOL: &str = env!("CARGO_PKG_NAME");
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// One declared tolerance check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    /// Passes when `value ≤ tolerance`.
    pub fn at_most(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            value,
            tolerance,
            passed: value <= tolerance,
        }
    }

    /// A boolean condition recorded as value 1 (true) or 0 (false).
    pub fn holds(name: impl Into<String>, ok: bool) -> Self {
        Self {
            name: name.into(),
            value: if ok { 1.0 } else { 0.0 },
            tolerance: 1.0,
            passed: ok,
        }
    }
}

/// A column-oriented table for plotting.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Self {
            name: name.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub tool: String,
    pub version: String,
    pub experiment: Experiment,
    pub config: ExperimentConfig,
    pub certificates: Vec<ConvexityCertificate>,
    pub results: Value,
    pub checks: Vec<Check>,
    /// Failures that prevented part of the experiment from running.
    pub errors: Vec<String>,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_s: Option<f64>,
    #[serde(skip)]
    pub tables: Vec<Table>,
}

impl ExperimentReport {
    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("report serializes");
        text.push('\n');
        text
    }

    /// The checks as CSV (`name,value,tolerance,passed`).
    pub fn checks_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["name", "value", "tolerance", "passed"])?;
        for c in &self.checks {
            w.write_record([
                c.name.clone(),
                c.value.to_string(),
                c.tolerance.to_string(),
                c.passed.to_string(),
            ])?;
        }
        let bytes = w.into_inner().map_err(|e| std::io::Error::other(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv is utf-8"))
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Json => Ok(self.to_json()),
            Format::Csv => self.checks_csv(),
        }
    }
}

/// Runs the configured experiment. Solver failures become report errors
/// (and a failed report); only configuration problems return `Err`.
pub fn run(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let (b1, b2) = config.bodies()?;
    let samples = config.solver.convexity_samples;
    let certificates = vec![certify(&b1, samples, config.seed), certify(&b2, samples, config.seed)];
    let mut report = ExperimentReport {
        tool: TOOL.into(),
        version: VERSION.into(),
        experiment: config.experiment,
        config: config.clone(),
        certificates,
        results: Value::Null,
        checks: Vec::new(),
        errors: Vec::new(),
        passed: false,
        wall_time_s: None,
        tables: Vec::new(),
    };
    for cert in &report.certificates {
        report
            .checks
            .push(Check::holds(format!("{} quadratically convex", cert.label), cert.certified));
    }
    if report.checks.iter().all(|c| c.passed) {
        let sphere = EmbeddedSphere::new(b1, b2)?;
        if let Err(e) = experiments::dispatch(config, &sphere, &mut report) {
            report.errors.push(e.to_string());
        }
    } else {
        report.errors.push("a body failed its convexity certificate; experiment not run".into());
    }
    report.passed = report.errors.is_empty() && report.checks.iter().all(|c| c.passed);
    Ok(report)
}

/// Writes every table of the report as `<dir>/<experiment>_<table>.csv`.
pub fn emit_plot_data(report: &ExperimentReport, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for table in &report.tables {
        let path = dir.join(format!("{}_{}.csv", report.experiment.name(), table.name));
        let mut w = csv::Writer::from_path(&path)?;
        w.write_record(&table.columns)?;
        for row in &table.rows {
            w.write_record(row.iter().map(|v| v.to_string()))?;
        }
        w.flush()?;
        written.push(path);
    }
    Ok(written)
}
