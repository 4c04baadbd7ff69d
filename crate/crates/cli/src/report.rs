//! JSON report and CSV path samples.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;

use crate::CliError;

/// How a check compares its estimate with the target.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    /// `|estimate − target| ≤ tolerance`.
    Absolute,
    /// `|estimate / target − 1| ≤ tolerance`.
    Relative,
    /// `estimate ≤ tolerance`; the target is the ideal value 0.
    AtMost,
    /// `|estimate − target| ≤ tolerance · std_error`.
    StdErrors,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub rule: Rule,
    pub target: f64,
    pub estimate: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub std_error: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ci: Option<[f64; 2]>,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, rule: Rule, target: f64, estimate: f64, tolerance: f64) -> Self {
        let mut c = Self {
            name: name.into(),
            rule,
            target,
            estimate,
            std_error: None,
            ci: None,
            tolerance,
            pass: false,
        };
        c.pass = c.evaluate();
        c
    }

    pub fn with_ci(mut self, ci: [f64; 2]) -> Self {
        self.ci = Some(ci);
        self
    }

    pub fn with_std_error(mut self, se: f64) -> Self {
        self.std_error = Some(se);
        self.pass = self.evaluate();
        self
    }

    /// Pass/fail from the recorded numbers alone. NaN never passes.
    pub fn evaluate(&self) -> bool {
        let (e, t, tol) = (self.estimate, self.target, self.tolerance);
        match self.rule {
            Rule::Absolute => (e - t).abs() <= tol,
            Rule::Relative => (e / t - 1.0).abs() <= tol,
            Rule::AtMost => e <= tol,
            Rule::StdErrors => self.std_error.is_some_and(|se| (e - t).abs() <= tol * se),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridEcho {
    pub horizon: f64,
    pub steps: usize,
}

/// Everything needed to regenerate a run, its checks and headline metrics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub scenario: String,
    pub seed: u64,
    pub paths: usize,
    pub grid: GridEcho,
    /// Parameters after defaults were filled in.
    pub parameters: BTreeMap<String, Value>,
    pub tolerance_overrides: BTreeMap<String, f64>,
    pub checks: Vec<Check>,
    pub metrics: BTreeMap<String, f64>,
    pub pass: bool,
    /// Files written next to the report, by role.
    pub outputs: BTreeMap<String, String>,
    pub wall_clock_seconds: f64,
}

impl Report {
    pub fn failed_checks(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn to_json(&self) -> Result<String, CliError> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }
}

/// A few simulated paths, one column per series.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SampleTable {
    pub times: Vec<f64>,
    pub series: Vec<&'static str>,
    /// `paths[k][j][i]`: path `k`, series `j`, grid index `i`.
    pub paths: Vec<Vec<Vec<f64>>>,
}

impl SampleTable {
    /// Long format: `t, path, <series>…`, shortest round-trip decimal for every value.
    pub fn write_csv(&self, path: &Path) -> Result<(), CliError> {
        let file = File::create(path).map_err(|e| CliError::io(path, e))?;
        let mut w = csv::Writer::from_writer(BufWriter::new(file));
        let mut header = vec!["t".to_string(), "path".to_string()];
        header.extend(self.series.iter().map(|s| s.to_string()));
        w.write_record(&header)?;
        let mut record = Vec::with_capacity(header.len());
        for (k, path_series) in self.paths.iter().enumerate() {
            for (i, t) in self.times.iter().enumerate() {
                record.clear();
                record.push(t.to_string());
                record.push(k.to_string());
                record.extend(path_series.iter().map(|col| col[i].to_string()));
                w.write_record(&record)?;
            }
        }
        w.flush().map_err(|e| CliError::io(path, e))?;
        Ok(())
    }
}

/// Writes `<scenario>_paths.csv` and `<scenario>_report.json` into `dir`
/// and records the file names in the report.
pub fn write_outputs(report: &mut Report, table: &SampleTable, dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let csv_name = format!("{}_paths.csv", report.scenario);
    let json_name = format!("{}_report.json", report.scenario);
    let csv_path = dir.join(&csv_name);
    table.write_csv(&csv_path)?;
    report.outputs.insert("paths_csv".into(), csv_name);
    let json_path = dir.join(&json_name);
    let mut f = File::create(&json_path).map_err(|e| CliError::io(&json_path, e))?;
    f.write_all(report.to_json()?.as_bytes()).map_err(|e| CliError::io(&json_path, e))?;
    Ok(vec![csv_path, json_path])
}
