//! Scenario configuration, read from TOML.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    UnfoldSkorokhod,
    UnfoldConventional,
    SkewBm,
    SkewBessel,
    Ocone,
    Nakao,
    Particles,
    LocaltimeXval,
}

impl Scenario {
    pub const ALL: [Scenario; 8] = [
        Scenario::UnfoldSkorokhod,
        Scenario::UnfoldConventional,
        Scenario::SkewBm,
        Scenario::SkewBessel,
        Scenario::Ocone,
        Scenario::Nakao,
        Scenario::Particles,
        Scenario::LocaltimeXval,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::UnfoldSkorokhod => "unfold-skorokhod",
            Scenario::UnfoldConventional => "unfold-conventional",
            Scenario::SkewBm => "skew-bm",
            Scenario::SkewBessel => "skew-bessel",
            Scenario::Ocone => "ocone",
            Scenario::Nakao => "nakao",
            Scenario::Particles => "particles",
            Scenario::LocaltimeXval => "localtime-xval",
        }
    }

    /// One-line summary of what the scenario checks.
    pub fn description(self) -> &'static str {
        match self {
            Scenario::UnfoldSkorokhod => {
                "skew unfolding of the Skorokhod reflection; |X| = S, S = U + C, L^X = alpha L^S"
            }
            Scenario::UnfoldConventional => {
                "skew unfolding of |U| with the Levy transform as driver; sign law of the unfolding"
            }
            Scenario::SkewBm => "skew Brownian motion; P(X(T) > 0) = alpha",
            Scenario::SkewBessel => {
                "skew Bessel process; (1 - alpha) L^G(X) = alpha L^-G(X), L^R = 0, sign law"
            }
            Scenario::Ocone => "two solutions of the Tanaka equation with different third moments",
            Scenario::Nakao => "strong solution of the perturbed skew-Tanaka equation; sign law, driver QV",
            Scenario::Particles => {
                "two particles with skew-elastic collisions; zeta L^Y = eta L^-Y, rewired drivers"
            }
            Scenario::LocaltimeXval => "occupation, upcrossing and Tanaka local-time estimators on |B|",
        }
    }

    /// Parameters the scenario cannot run without.
    pub fn required_params(self) -> &'static [&'static str] {
        match self {
            Scenario::UnfoldSkorokhod | Scenario::UnfoldConventional | Scenario::SkewBm | Scenario::Nakao => &["alpha"],
            Scenario::SkewBessel => &["alpha", "delta"],
            Scenario::Ocone => &["u", "v"],
            Scenario::Particles => &["zeta1", "zeta2", "eta1", "eta2"],
            Scenario::LocaltimeXval => &[],
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Scenario::ALL
            .into_iter()
            .find(|sc| sc.name() == s)
            .ok_or_else(|| CliError::Config(format!("unknown scenario `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(default = "default_horizon")]
    pub horizon: f64,
    pub steps: usize,
}

fn default_horizon() -> f64 {
    1.0
}

/// Model parameters; which ones are needed depends on the scenario.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x0: Option<f64>,
    /// Zero-set tolerance for excursion detection.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    /// Skewness of the driver for `unfold-conventional`; plain Brownian when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub driver_skew: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub u: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub v: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub g: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub zeta1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub zeta2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta2: Option<f64>,
    /// Local-time estimator used to build the particle system: occupation, upcrossing or tanaka.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub estimator: Option<String>,
    /// Paths used for the mean in `localtime-xval`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean_paths: Option<usize>,
}

impl Params {
    fn get(&self, name: &str) -> Option<f64> {
        match name {
            "alpha" => self.alpha,
            "delta" => self.delta,
            "u" => self.u,
            "v" => self.v,
            "zeta1" => self.zeta1,
            "zeta2" => self.zeta2,
            "eta1" => self.eta1,
            "eta2" => self.eta2,
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: Option<PathBuf>,
    /// Number of simulated paths written to CSV.
    #[serde(default = "default_sample_paths")]
    pub sample_paths: usize,
}

fn default_sample_paths() -> usize {
    1
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            dir: None,
            sample_paths: default_sample_paths(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    /// Must match the scenario named on the command line when present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scenario: Option<Scenario>,
    #[serde(default)]
    pub seed: u64,
    pub paths: usize,
    /// Worker threads for the batch driver. Results do not depend on it.
    #[serde(default, skip_serializing)]
    pub workers: Option<usize>,
    pub grid: GridConfig,
    #[serde(default)]
    pub params: Params,
    /// Overrides of check tolerances, keyed by check name.
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    #[serde(default, skip_serializing)]
    pub output: OutputConfig,
}

impl ScenarioConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    /// Checks that everything `scenario` needs is present and sane.
    pub fn validate(&self, scenario: Scenario) -> Result<(), CliError> {
        if let Some(named) = self.scenario {
            if named != scenario {
                return Err(CliError::Config(format!(
                    "config is for `{named}` but `{scenario}` was requested"
                )));
            }
        }
        if self.paths < 2 {
            return Err(CliError::Config("paths must be at least 2".into()));
        }
        if self.workers == Some(0) {
            return Err(CliError::Config("workers must be positive".into()));
        }
        if !(self.grid.horizon > 0.0 && self.grid.horizon.is_finite()) || self.grid.steps == 0 {
            return Err(CliError::Config("grid needs a positive horizon and at least one step".into()));
        }
        let missing: Vec<&str> = scenario
            .required_params()
            .iter()
            .copied()
            .filter(|p| self.params.get(p).is_none())
            .collect();
        if !missing.is_empty() {
            return Err(CliError::Config(format!(
                "scenario `{scenario}` needs parameter(s): {}",
                missing.join(", ")
            )));
        }
        if let Some(e) = &self.params.estimator {
            parse_estimator(e)?;
        }
        for (name, value) in &self.tolerances {
            if !(value.is_finite() && *value >= 0.0) {
                return Err(CliError::Config(format!("tolerance `{name}` must be a nonnegative number")));
            }
        }
        Ok(())
    }

    /// Tolerance for a check: the override if configured, else `default`.
    pub fn tolerance(&self, check: &str, default: f64) -> f64 {
        self.tolerances.get(check).copied().unwrap_or(default)
    }
}

pub fn parse_estimator(name: &str) -> Result<skewfold::Method, CliError> {
    match name {
        "occupation" => Ok(skewfold::Method::Occupation),
        "upcrossing" => Ok(skewfold::Method::Upcrossing),
        "tanaka" => Ok(skewfold::Method::Tanaka),
        other => Err(CliError::Config(format!(
            "unknown estimator `{other}` (expected occupation, upcrossing or tanaka)"
        ))),
    }
}
