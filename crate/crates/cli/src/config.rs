//! Experiment configuration: what the command line asks for, validated before
//! any sampling and echoed verbatim into every report.

use serde::{Deserialize, Serialize};
use sectio::estimators::{BpKind, EstimatorOptions, TheoremId, DEFAULT_EQ_TOL};
use sectio::kernel::{IdentityFamily, MomentParams};
use thiserror::Error;

/// Version tag written into every report.
pub const REPORT_VERSION: &str = "1";
/// Largest number of cells a sweep may contain.
pub const MAX_SWEEP_CELLS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Constants,
    Verify,
    Identity,
    BpCheck,
    Crofton,
    Sweep,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("missing --{0}")]
    Missing(&'static str),
    #[error("invalid configuration: {0}")]
    Invalid(String),
    #[error(transparent)]
    Params(#[from] sectio::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub command: Command,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theorem: Option<TheoremId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<IdentityFamily>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<BpKind>,
    /// Body descriptors; exactly one except for sweeps.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub bodies: Vec<String>,
    pub d: usize,
    /// Section dimensions; exactly one except for sweeps.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub ks: Vec<usize>,
    /// Moment exponents; exactly one except for sweeps.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub ps: Vec<f64>,
    pub n: u64,
    pub n_inner: u64,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
    pub eq_tol: f64,
    #[serde(default)]
    pub probabilistic: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub section_fallback: Option<u64>,
    #[serde(default)]
    pub format: OutputFormat,
}

impl ExperimentConfig {
    pub fn new(command: Command, d: usize) -> Self {
        Self {
            command,
            theorem: None,
            family: None,
            kind: None,
            bodies: Vec::new(),
            d,
            ks: Vec::new(),
            ps: Vec::new(),
            n: 100_000,
            n_inner: 1000,
            seed: 0,
            workers: None,
            eq_tol: DEFAULT_EQ_TOL,
            probabilistic: false,
            section_fallback: None,
            format: OutputFormat::Json,
        }
    }

    pub fn options(&self) -> EstimatorOptions {
        EstimatorOptions::new(self.n, self.seed)
            .with_workers(self.workers)
            .with_eq_tol(self.eq_tol)
            .with_inner(self.n_inner)
            .with_section_fallback(self.section_fallback)
    }

    fn single<T: Copy>(values: &[T], name: &'static str) -> Result<T, ConfigError> {
        match values {
            [v] => Ok(*v),
            [] => Err(ConfigError::Missing(name)),
            _ => Err(ConfigError::Invalid(format!("--{name} takes a single value for this command"))),
        }
    }

    pub fn k(&self) -> Result<usize, ConfigError> {
        Self::single(&self.ks, "k")
    }

    pub fn p(&self) -> Result<f64, ConfigError> {
        Self::single(&self.ps, "p")
    }

    pub fn body(&self) -> Result<&str, ConfigError> {
        match self.bodies.as_slice() {
            [b] => Ok(b),
            [] => Err(ConfigError::Missing("body")),
            _ => Err(ConfigError::Invalid("--body takes a single value for this command".into())),
        }
    }

    pub fn theorem(&self) -> Result<TheoremId, ConfigError> {
        self.theorem.ok_or(ConfigError::Missing("theorem"))
    }

    /// Checks everything that can be checked without touching a body file or
    /// drawing a sample.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if !(self.eq_tol.is_finite() && self.eq_tol >= 0.0) {
            return Err(ConfigError::Invalid(format!("eq_tol must be non-negative, got {}", self.eq_tol)));
        }
        if self.workers == Some(0) {
            return Err(ConfigError::Invalid("workers must be positive".into()));
        }
        let needs_samples = !matches!(self.command, Command::Constants);
        if needs_samples && self.n < 2 {
            return Err(ConfigError::Invalid(format!("n must be at least 2, got {}", self.n)));
        }
        match self.command {
            Command::Constants => {
                MomentParams::new(self.d, self.k()?, self.p()?)?;
            }
            Command::Verify => {
                self.theorem()?;
                self.body()?;
                MomentParams::new(self.d, self.k()?, self.p()?)?;
            }
            Command::Identity => {
                self.family.ok_or(ConfigError::Missing("family"))?;
                self.body()?;
                MomentParams::new(self.d, 1, self.p()?)?;
            }
            Command::BpCheck => {
                self.kind.ok_or(ConfigError::Missing("kind"))?;
                self.body()?;
                if self.n_inner == 0 {
                    return Err(ConfigError::Invalid("n_inner must be positive".into()));
                }
                MomentParams::new(self.d, self.k()?, self.p()?)?;
            }
            Command::Crofton => {
                self.body()?;
                self.k()?;
            }
            Command::Sweep => {
                self.theorem()?;
                let cells = self.bodies.len() * self.ks.len() * self.ps.len();
                if cells > MAX_SWEEP_CELLS {
                    return Err(ConfigError::Invalid(format!("sweep has {cells} cells, limit is {MAX_SWEEP_CELLS}")));
                }
            }
        }
        Ok(())
    }
}
