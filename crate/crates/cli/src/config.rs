//! Run configuration: defaults, JSON overrides and command-line flags.

use crate::suite::SuiteConfig;
use psym::dual::FinderOptions;
use psym::index::IndexOptions;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

/// Effective parameters of one run, echoed into the report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub surface: Option<PathBuf>,
    pub path: Option<PathBuf>,
    /// Iterate numbers. `ellipsoid-analyze`, `find-orbits` and `iterate` read
    /// `m` as the `(2m−1)`-th iterate; `index-path` as the (odd) iteration count.
    pub m: Vec<usize>,
    /// Points `ω = e^{2πix}` given by their fraction `x` of a full turn.
    pub omega: Vec<f64>,
    pub seed: u64,
    pub finder: FinderOptions,
    pub index: IndexOptions,
    /// Samples of the P-symmetry check of a surface.
    pub symmetry_samples: usize,
    /// RK4 steps over a half period when integrating a monodromy.
    pub monodromy_steps: usize,
    /// Relative slack on the action window `[πr², πR²]`.
    pub action_tol: f64,
    pub iterate: IterateConfig,
    pub suite: SuiteConfig,
    pub out: Option<PathBuf>,
    pub reproducible: bool,
}

/// Closed-form input of the `iterate` command.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IterateConfig {
    pub case: Option<u8>,
    pub theta: Option<f64>,
    pub i1: Option<i64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            surface: None,
            path: None,
            m: vec![1, 2],
            omega: vec![0.0],
            seed: FinderOptions::default().seed,
            finder: FinderOptions::default(),
            index: IndexOptions::default(),
            symmetry_samples: 4096,
            monodromy_steps: 256,
            action_tol: 1e-4,
            iterate: IterateConfig::default(),
            suite: SuiteConfig::default(),
            out: None,
            reproducible: false,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read { path: String, source: std::io::Error },
    #[error("invalid config {path}: {source}")]
    Parse { path: String, source: serde_json::Error },
    #[error("invalid setting: {0}")]
    Invalid(String),
}

impl RunConfig {
    /// Defaults overridden by a (partial) JSON document.
    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| ConfigError::Read { path: path.display().to_string(), source })?;
        serde_json::from_str(&text).map_err(|source| ConfigError::Parse { path: path.display().to_string(), source })
    }

    /// Propagates the run seed into the sections that draw random numbers.
    pub fn resolve(mut self) -> Result<Self, ConfigError> {
        self.finder.seed = self.seed;
        self.suite.seed = self.seed;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |msg: String| Err(ConfigError::Invalid(msg));
        self.index.tol.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
        let positive = [
            ("index.delta", self.index.delta),
            ("index.max_step", self.index.max_step),
            ("index.root_tol", self.index.root_tol),
            ("finder.dedup_tol", self.finder.dedup_tol),
            ("action_tol", self.action_tol),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return bad(format!("{name} must be positive, got {v}"));
            }
        }
        if self.m.iter().any(|&m| m == 0) {
            return bad("m values must be positive".into());
        }
        if self.omega.iter().any(|x| !x.is_finite()) {
            return bad("omega fractions must be finite".into());
        }
        if self.finder.restarts == 0 || self.finder.n_max == 0 || self.finder.schedule.is_empty() {
            return bad("finder needs restarts ≥ 1, modes ≥ 1 and a non-empty schedule".into());
        }
        if self.monodromy_steps < 64 {
            return bad("monodromy_steps must be at least 64".into());
        }
        self.suite.validate().map_err(ConfigError::Invalid)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partial_override_keeps_defaults() {
        let c: RunConfig = serde_json::from_str(r#"{ "m": [1], "index": { "delta": 0.05 } }"#).unwrap();
        assert_eq!(c.m, vec![1]);
        assert_eq!(c.index.delta, 0.05);
        assert_eq!(c.index.max_step, IndexOptions::default().max_step);
        assert_eq!(c.finder.restarts, FinderOptions::default().restarts);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(serde_json::from_str::<RunConfig>(r#"{ "mm": [1] }"#).is_err());
        assert!(serde_json::from_str::<RunConfig>(r#"{ "index": { "tolerance": 1 } }"#).is_err());
    }

    #[test]
    fn non_positive_tolerances_are_rejected() {
        let mut c = RunConfig::default();
        c.index.tol.rank = 0.0;
        assert!(c.validate().is_err());
        let mut c = RunConfig::default();
        c.action_tol = -1.0;
        assert!(c.validate().is_err());
        assert!(RunConfig::default().resolve().is_ok());
    }

    #[test]
    fn seed_reaches_every_section() {
        let c = RunConfig { seed: 42, ..RunConfig::default() }.resolve().unwrap();
        assert_eq!((c.finder.seed, c.suite.seed), (42, 42));
    }
}
