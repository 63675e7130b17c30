use std::collections::BTreeMap;
use std::path::PathBuf;

use ncfun_core::ncfun::DEFAULT_SERIES_TRUNCATION;
use ncfun_core::taylor::{DEFAULT_SCALAR_TOL, DEFAULT_WORD_CAP};
use ncfun_core::verify::SuiteConfig;
use serde::Deserialize;

use crate::error::CliError;

/// Tolerance names accepted under `tolerances`, with defaults.
pub const TOLERANCES: [(&str, f64); 3] = [
    ("scalar", DEFAULT_SCALAR_TOL),
    ("isometry", ncfun_core::realization::ISOMETRY_TOL),
    ("cross_check", 1e-5),
];

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SuiteSection {
    pub dims: Vec<usize>,
    pub trials: usize,
    pub max_order: usize,
    pub scalar_dims: Vec<usize>,
}

impl Default for SuiteSection {
    fn default() -> Self {
        let s = SuiteConfig::default();
        SuiteSection {
            dims: s.dims,
            trials: s.trials,
            max_order: s.max_order,
            scalar_dims: s.scalar_dims,
        }
    }
}

/// Contents of a `--config` file. Every field is optional.
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CliConfig {
    pub seed: u64,
    pub tolerances: BTreeMap<String, f64>,
    /// Largest matrix dimension accepted from point files and scans.
    pub max_dim: usize,
    /// Largest number of words an expansion may extract.
    pub word_cap: usize,
    /// Truncation degree for series handles that do not set one.
    pub truncation: usize,
    pub out: Option<PathBuf>,
    pub suite: SuiteSection,
}

impl Default for CliConfig {
    fn default() -> Self {
        CliConfig {
            seed: 0,
            tolerances: BTreeMap::new(),
            max_dim: 64,
            word_cap: DEFAULT_WORD_CAP,
            truncation: DEFAULT_SERIES_TRUNCATION,
            out: None,
            suite: SuiteSection::default(),
        }
    }
}

impl CliConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        for (name, value) in &self.tolerances {
            if !TOLERANCES.iter().any(|(known, _)| known == name) {
                let known: Vec<&str> = TOLERANCES.iter().map(|(k, _)| *k).collect();
                return Err(CliError::Config(format!(
                    "unknown tolerance {name:?}; known: {}",
                    known.join(", ")
                )));
            }
            if !(*value > 0.0 && value.is_finite()) {
                return Err(CliError::Config(format!("tolerance {name:?} must be positive")));
            }
        }
        let caps = [
            ("max_dim", self.max_dim),
            ("word_cap", self.word_cap),
            ("suite.trials", self.suite.trials),
            ("suite.max_order", self.suite.max_order),
        ];
        for (name, v) in caps {
            if v == 0 {
                return Err(CliError::Config(format!("{name} must be positive")));
            }
        }
        if self.suite.dims.is_empty() || self.suite.dims.contains(&0) {
            return Err(CliError::Config("suite.dims must be non-empty and positive".into()));
        }
        if self.suite.scalar_dims.contains(&0) {
            return Err(CliError::Config("suite.scalar_dims must be positive".into()));
        }
        if let Some(&big) = self.suite.dims.iter().chain(&self.suite.scalar_dims).max() {
            if big > self.max_dim {
                return Err(CliError::Config(format!("suite dimension {big} exceeds max_dim")));
            }
        }
        Ok(())
    }

    pub fn tolerance(&self, name: &str) -> f64 {
        self.tolerances.get(name).copied().unwrap_or_else(|| {
            TOLERANCES
                .iter()
                .find(|(k, _)| *k == name)
                .map(|(_, v)| *v)
                .expect("tolerance name is known")
        })
    }

    pub fn suite_config(&self, seed: u64) -> SuiteConfig {
        SuiteConfig {
            seed,
            dims: self.suite.dims.clone(),
            trials: self.suite.trials,
            max_order: self.suite.max_order,
            scalar_dims: self.suite.scalar_dims.clone(),
        }
    }
}
