//! Experiment configuration, read from JSON.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::family::{FamilySpec, ZeroList};
use crate::registry;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub path: PathBuf,
    #[serde(default)]
    pub format: Format,
}

/// Per-diagnostic knobs. Absent fields take the diagnostic's defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<u32>,
    /// Relative quadrature tolerance.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    /// Number of interior (or boundary) sample points.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    /// Outer modulus of sampled interior points.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_alpha: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radii: Option<Vec<f64>>,
    /// Raster cells per direction for image areas.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub raster: Option<usize>,
    /// Stopping parameter `M`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m_values: Option<Vec<f64>>,
    /// Constant `C` of ray and boundary-derivative conditions.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    /// Second factor for composition diagnostics.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partner: Option<ZeroList>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagnosticSpec {
    pub name: String,
    /// Overrides the default pass threshold.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
    #[serde(default)]
    pub params: Params,
}

impl DiagnosticSpec {
    pub fn named(name: &str) -> Self {
        Self {
            name: name.to_string(),
            threshold: None,
            params: Params::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Seeds random families without a seed of their own and all sample
    /// points.
    #[serde(default)]
    pub seed: u64,
    pub families: Vec<FamilySpec>,
    #[serde(default)]
    pub diagnostics: Vec<DiagnosticSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputSpec>,
    /// Records not started within the budget are flagged as timed out.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time_budget_seconds: Option<f64>,
    /// Fill the `seconds` column. Off by default so reports are byte-stable.
    #[serde(default)]
    pub record_timing: bool,
}

#[derive(Debug)]
pub enum ConfigError {
    Io(PathBuf, std::io::Error),
    Parse(serde_json::Error),
    UnknownDiagnostic(String),
    Invalid(String),
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::Io(p, e) => write!(f, "cannot read {}: {e}", p.display()),
            ConfigError::Parse(e) => write!(f, "invalid config: {e}"),
            ConfigError::UnknownDiagnostic(n) => write!(f, "unknown diagnostic {n:?}"),
            ConfigError::Invalid(m) => write!(f, "invalid config: {m}"),
        }
    }
}

impl std::error::Error for ConfigError {}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let cfg: Self = serde_json::from_str(text).map_err(ConfigError::Parse)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io(path.to_path_buf(), e))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        for d in &self.diagnostics {
            if registry::find(&d.name).is_none() {
                return Err(ConfigError::UnknownDiagnostic(d.name.clone()));
            }
        }
        if let Some(b) = self.time_budget_seconds {
            if !(b >= 0.0) {
                return Err(ConfigError::Invalid(format!("time budget {b} must be nonnegative")));
            }
        }
        for fam in &self.families {
            fam.generate(self.seed)
                .map_err(|e| ConfigError::Invalid(format!("family {}: {e}", fam.label())))?;
        }
        Ok(())
    }
}
