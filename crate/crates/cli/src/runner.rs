//! Executes a validated configuration.

use std::time::Instant;

use sectio::estimators::{bp_check, crofton_intrinsic, identity_check, verify, verify_probabilistic};
use sectio::kernel::MomentParams;
use sectio::rng::mix_seed;
use sectio::stats::McConfig;

use crate::body_spec::parse_body_spec;
use crate::config::{Command, ConfigError, ExperimentConfig};
use crate::report::{Payload, ReportDocument};

enum Failure {
    Config(String),
    Body(String),
    Estimator(String),
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e.to_string())
    }
}

impl From<sectio::Error> for Failure {
    fn from(e: sectio::Error) -> Self {
        Failure::Estimator(e.to_string())
    }
}

fn payload(cfg: &ExperimentConfig) -> Result<Payload, Failure> {
    cfg.validate()?;
    let d = cfg.d;
    let body = || parse_body_spec(cfg.body()?, d).map_err(|e| Failure::Body(e.to_string()));
    let opts = cfg.options();
    Ok(match cfg.command {
        Command::Constants => {
            let params = MomentParams::new(d, cfg.k()?, cfg.p()?)?;
            Payload::Constants { constants: crate::report::ConstantsTable::new(&params) }
        }
        Command::Verify => {
            let params = MomentParams::new(d, cfg.k()?, cfg.p()?)?;
            let theorem = cfg.theorem()?;
            let body = body()?;
            let report = if cfg.probabilistic {
                verify_probabilistic(theorem, &body, &params, &opts)?
            } else {
                verify(theorem, &body, &params, &opts)?
            };
            Payload::Inequality { report }
        }
        Command::Identity => {
            let family = cfg.family.ok_or(ConfigError::Missing("family"))?;
            let out = identity_check(family, &body()?, cfg.p()?, &opts)?;
            Payload::Identity { report: out.report, adjudication: out.adjudication }
        }
        Command::BpCheck => {
            let kind = cfg.kind.ok_or(ConfigError::Missing("kind"))?;
            let report = bp_check(kind, &body()?, cfg.k()?, cfg.p()?, &opts)?;
            Payload::Inequality { report }
        }
        Command::Crofton => {
            let k = cfg.k()?;
            let estimate = crofton_intrinsic(&body()?, k, McConfig::new(cfg.n, cfg.seed).with_workers(cfg.workers))?;
            Payload::Estimate { quantity: format!("V{}", d.saturating_sub(k)), estimate }
        }
        Command::Sweep => return Err(Failure::Config("sweeps produce one report per cell".into())),
    })
}

/// Runs a single (non-sweep) command. Errors become a report with an
/// `error` field.
pub fn run_one(cfg: ExperimentConfig, timing: bool) -> ReportDocument {
    let start = Instant::now();
    let mut doc = match payload(&cfg) {
        Ok(p) => ReportDocument::success(cfg, p),
        Err(Failure::Config(m)) => ReportDocument::failure(cfg, "config", m),
        Err(Failure::Body(m)) => ReportDocument::failure(cfg, "body", m),
        Err(Failure::Estimator(m)) => ReportDocument::failure(cfg, "estimator", m),
    };
    if timing {
        doc.wall_time_seconds = Some(start.elapsed().as_secs_f64());
    }
    doc
}

/// The per-cell configurations of a sweep, in row order: bodies, then
/// section dimensions, then exponents. Cell `i` uses seed
/// `mix_seed(root, i)`.
pub fn sweep_cells(cfg: &ExperimentConfig) -> Vec<ExperimentConfig> {
    let mut cells = Vec::new();
    for body in &cfg.bodies {
        for &k in &cfg.ks {
            for &p in &cfg.ps {
                let index = cells.len() as u64;
                cells.push(ExperimentConfig {
                    command: Command::Verify,
                    bodies: vec![body.clone()],
                    ks: vec![k],
                    ps: vec![p],
                    seed: mix_seed(cfg.seed, index),
                    ..cfg.clone()
                });
            }
        }
    }
    cells
}

/// Runs every command, including sweeps, and returns one report per cell.
pub fn run(cfg: ExperimentConfig, timing: bool) -> Vec<ReportDocument> {
    if cfg.command != Command::Sweep {
        return vec![run_one(cfg, timing)];
    }
    if let Err(e) = cfg.validate() {
        return vec![ReportDocument::failure(cfg, "config", e.to_string())];
    }
    sweep_cells(&cfg).into_iter().map(|cell| run_one(cell, timing)).collect()
}
