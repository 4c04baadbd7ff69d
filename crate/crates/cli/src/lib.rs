//! Scenario runner: named, configurable, reproducible verification runs that
//! write CSV path samples and a JSON report.

pub mod config;
pub mod report;
pub mod scenarios;

use std::path::{Path, PathBuf};

pub use config::{Scenario, ScenarioConfig};
pub use report::{Check, Report, Rule, SampleTable};
pub use scenarios::{run_scenario, RunOutput};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "SKEWFOLD_OUT";
pub const DEFAULT_OUT_DIR: &str = "skewfold-out";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Model(#[from] skewfold::Error),
    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),
    #[error("json output: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

/// Output directory: explicit flag, then config, then `SKEWFOLD_OUT`, then `./skewfold-out`.
pub fn resolve_out_dir(flag: Option<&Path>, config: &ScenarioConfig) -> PathBuf {
    flag.map(Path::to_path_buf)
        .or_else(|| config.output.dir.clone())
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR))
}

/// Validates, runs and writes outputs. The returned report carries the file names.
pub fn execute(scenario: Scenario, config: &ScenarioConfig, out_dir: &Path) -> Result<Report, CliError> {
    config.validate(scenario)?;
    let RunOutput { mut report, samples } = run_scenario(scenario, config)?;
    report::write_outputs(&mut report, &samples, out_dir)?;
    Ok(report)
}
