//! Command-line flags and how they override a config file.

use crate::commands::{Command, CliError};
use crate::config::RunConfig;
use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(name = "psym", version, about = "P-index computations for P-symmetric closed characteristics")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Sub,
    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Debug, Subcommand)]
pub enum Sub {
    /// Find orbits on an ellipsoid and check the stability statement on them.
    EllipsoidAnalyze,
    /// Critical points of the dual action with index and Floquet data.
    FindOrbits,
    /// (i, ν) of a path at the requested ω, plus iteration sums.
    IndexPath,
    /// Iterated indices from a case and i₁, or from a path.
    Iterate,
    /// Case formulas, splitting numbers and iterated-index bounds.
    VerifySuite,
}

impl Sub {
    pub fn command(&self) -> Command {
        match self {
            Sub::EllipsoidAnalyze => Command::EllipsoidAnalyze,
            Sub::FindOrbits => Command::FindOrbits,
            Sub::IndexPath => Command::IndexPath,
            Sub::Iterate => Command::Iterate,
            Sub::VerifySuite => Command::VerifySuite,
        }
    }
}

#[derive(Debug, Default, Args)]
pub struct Flags {
    /// JSON file with config overrides; flags win over it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Surface file: {"n", "kappa", "radii", "alpha"?}.
    #[arg(long, global = true)]
    pub surface: Option<PathBuf>,
    /// Path file (kind: constant, samples or endpoint).
    #[arg(long, global = true)]
    pub path: Option<PathBuf>,
    /// Comma-separated iterate numbers.
    #[arg(long, global = true, value_delimiter = ',')]
    pub m: Option<Vec<usize>>,
    /// Comma-separated ω as fractions of a turn, e.g. 0,1/3,2/3.
    #[arg(long, global = true, value_delimiter = ',', value_parser = parse_fraction, allow_hyphen_values = true)]
    pub omega: Option<Vec<f64>>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Galerkin truncation N_max of the orbit search.
    #[arg(long, global = true)]
    pub modes: Option<usize>,
    /// Restarts per symmetry sector.
    #[arg(long, global = true)]
    pub restarts: Option<usize>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Omit wall-clock data so equal inputs give byte-identical reports.
    #[arg(long, global = true)]
    pub reproducible: bool,
    /// Case number 1–10 (iterate).
    #[arg(long, global = true)]
    pub case: Option<u8>,
    /// Rotation angle of cases 7–9 (iterate).
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub theta: Option<f64>,
    /// i_{P,1} of the first iterate (iterate).
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub i1: Option<i64>,
    /// Mutation fixture: swap the case-7 splitting pairs in the table.
    #[arg(long, global = true, hide = true)]
    pub flip_case7: bool,
    /// More log output (-v info, -vv debug); RUST_LOG overrides.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
}

fn parse_fraction(s: &str) -> Result<f64, String> {
    let s = s.trim();
    let v = match s.split_once('/') {
        Some((a, b)) => {
            let a: f64 = a.trim().parse().map_err(|e| format!("{s}: {e}"))?;
            let b: f64 = b.trim().parse().map_err(|e| format!("{s}: {e}"))?;
            if b == 0.0 {
                return Err(format!("{s}: zero denominator"));
            }
            a / b
        }
        None => s.parse().map_err(|e| format!("{s}: {e}"))?,
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("{s} is not finite"))
    }
}

impl Flags {
    /// Defaults, then the config file, then flags. For `verify-suite`, `--m`
    /// sets the iterate range of the case-formula checks.
    pub fn to_config(&self, cmd: Command) -> Result<RunConfig, CliError> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::from_file(p)?,
            None => RunConfig::default(),
        };
        if let Some(v) = &self.surface {
            cfg.surface = Some(v.clone());
        }
        if let Some(v) = &self.path {
            cfg.path = Some(v.clone());
        }
        if let Some(v) = &self.m {
            cfg.m = v.clone();
            if cmd == Command::VerifySuite {
                cfg.suite.m_range = v.clone();
            }
        }
        if let Some(v) = &self.omega {
            cfg.omega = v.clone();
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if let Some(v) = self.modes {
            cfg.finder.n_max = v;
        }
        if let Some(v) = self.restarts {
            cfg.finder.restarts = v;
        }
        if let Some(v) = &self.out {
            cfg.out = Some(v.clone());
        }
        if self.reproducible {
            cfg.reproducible = true;
        }
        if let Some(v) = self.case {
            cfg.iterate.case = Some(v);
        }
        if let Some(v) = self.theta {
            cfg.iterate.theta = Some(v);
        }
        if let Some(v) = self.i1 {
            cfg.iterate.i1 = Some(v);
        }
        if self.flip_case7 {
            cfg.suite.flip_case7 = true;
        }
        Ok(cfg.resolve()?)
    }
}
