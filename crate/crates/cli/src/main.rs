use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use sectio::estimators::{BpKind, TheoremId, DEFAULT_EQ_TOL};
use sectio::kernel::IdentityFamily;
use sectio_cli::config::{Command, ExperimentConfig, OutputFormat};
use sectio_cli::report::{batch_exit_code, write_constants_csv, write_csv, Payload, ReportDocument};
use sectio_cli::runner::run;

#[derive(Parser)]
#[command(name = "sectio", version, about = "Monte Carlo checks of section-moment inequalities for convex bodies")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "json")]
    format: Format,
    /// Add wall-clock time to reports (makes output non-reproducible).
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args, Clone)]
struct Sampling {
    /// Monte Carlo sample count.
    #[arg(long, default_value_t = 100_000)]
    n: u64,
    /// Root seed, decimal or 0x-prefixed hex.
    #[arg(long, env = "SECTIO_SEED", default_value = "0", value_parser = parse_seed)]
    seed: u64,
    /// Worker threads; defaults to all cores.
    #[arg(long)]
    workers: Option<usize>,
    /// Relative tolerance for equality verdicts.
    #[arg(long, default_value_t = DEFAULT_EQ_TOL)]
    eq_tol: f64,
}

#[derive(Subcommand)]
enum Sub {
    /// Print every closed-form constant for (d, k, p).
    Constants {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, allow_negative_numbers = true)]
        p: f64,
    },
    /// Estimate both sides of an inequality and classify the ratio.
    Verify {
        #[arg(long)]
        theorem: TheoremId,
        #[arg(long)]
        body: String,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, allow_negative_numbers = true)]
        p: f64,
        /// Use the conditional (hitting-flat) form of the affine inequalities.
        #[arg(long)]
        probabilistic: bool,
        /// Estimate polytope sections of dimension > 3 by membership
        /// counting with this many points.
        #[arg(long)]
        section_fallback: Option<u64>,
        #[command(flatten)]
        sampling: Sampling,
    },
    /// Check a one-dimensional moment identity.
    Identity {
        #[arg(long, value_parser = parse_family)]
        family: IdentityFamily,
        #[arg(long)]
        body: String,
        #[arg(long)]
        d: usize,
        #[arg(long, allow_negative_numbers = true)]
        p: f64,
        #[command(flatten)]
        sampling: Sampling,
    },
    /// Compare a direct integral with its Blaschke-Petkantschin decomposition.
    BpCheck {
        #[arg(long, value_parser = parse_kind)]
        kind: BpKind,
        #[arg(long)]
        body: String,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        p: f64,
        /// Inner samples per outer subspace or flat.
        #[arg(long, default_value_t = 1000)]
        n_inner: u64,
        #[command(flatten)]
        sampling: Sampling,
    },
    /// Estimate the intrinsic volume V_{d-k} from hitting k-flats.
    Crofton {
        #[arg(long)]
        body: String,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        k: usize,
        #[command(flatten)]
        sampling: Sampling,
    },
    /// Run one theorem over a grid of bodies, section dimensions and exponents.
    Sweep {
        #[arg(long)]
        theorem: TheoremId,
        /// Body descriptor; repeat for several bodies.
        #[arg(long = "body")]
        bodies: Vec<String>,
        #[arg(long)]
        d: usize,
        #[arg(long, value_delimiter = ',')]
        ks: Vec<usize>,
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        ps: Vec<f64>,
        #[arg(long, default_value_t = 1000)]
        n_inner: u64,
        #[command(flatten)]
        sampling: Sampling,
    },
    /// Re-run a saved configuration or the configuration echoed in a report.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
}

fn parse_seed(s: &str) -> Result<u64, String> {
    let parsed = match s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => s.parse(),
    };
    parsed.map_err(|e| format!("invalid seed '{s}': {e}"))
}

fn parse_family(s: &str) -> Result<IdentityFamily, String> {
    match s {
        "linear" => Ok(IdentityFamily::Linear),
        "affine" => Ok(IdentityFamily::Affine),
        _ => Err(format!("expected 'linear' or 'affine', found '{s}'")),
    }
}

fn parse_kind(s: &str) -> Result<BpKind, String> {
    match s {
        "linear" => Ok(BpKind::Linear),
        "affine" => Ok(BpKind::Affine),
        _ => Err(format!("expected 'linear' or 'affine', found '{s}'")),
    }
}

fn with_sampling(mut cfg: ExperimentConfig, s: Sampling) -> ExperimentConfig {
    cfg.n = s.n;
    cfg.seed = s.seed;
    cfg.workers = s.workers;
    cfg.eq_tol = s.eq_tol;
    cfg
}

fn to_config(sub: Sub) -> Result<ExperimentConfig, String> {
    Ok(match sub {
        Sub::Constants { d, k, p } => {
            let mut cfg = ExperimentConfig::new(Command::Constants, d);
            cfg.ks = vec![k];
            cfg.ps = vec![p];
            cfg
        }
        Sub::Verify { theorem, body, d, k, p, probabilistic, section_fallback, sampling } => {
            let mut cfg = with_sampling(ExperimentConfig::new(Command::Verify, d), sampling);
            cfg.theorem = Some(theorem);
            cfg.bodies = vec![body];
            cfg.ks = vec![k];
            cfg.ps = vec![p];
            cfg.probabilistic = probabilistic;
            cfg.section_fallback = section_fallback;
            cfg
        }
        Sub::Identity { family, body, d, p, sampling } => {
            let mut cfg = with_sampling(ExperimentConfig::new(Command::Identity, d), sampling);
            cfg.family = Some(family);
            cfg.bodies = vec![body];
            cfg.ps = vec![p];
            cfg
        }
        Sub::BpCheck { kind, body, d, k, p, n_inner, sampling } => {
            let mut cfg = with_sampling(ExperimentConfig::new(Command::BpCheck, d), sampling);
            cfg.kind = Some(kind);
            cfg.bodies = vec![body];
            cfg.ks = vec![k];
            cfg.ps = vec![p];
            cfg.n_inner = n_inner;
            cfg
        }
        Sub::Crofton { body, d, k, sampling } => {
            let mut cfg = with_sampling(ExperimentConfig::new(Command::Crofton, d), sampling);
            cfg.bodies = vec![body];
            cfg.ks = vec![k];
            cfg
        }
        Sub::Sweep { theorem, bodies, d, ks, ps, n_inner, sampling } => {
            let mut cfg = with_sampling(ExperimentConfig::new(Command::Sweep, d), sampling);
            cfg.theorem = Some(theorem);
            cfg.bodies = bodies;
            cfg.ks = ks;
            cfg.ps = ps;
            cfg.n_inner = n_inner;
            cfg
        }
        Sub::Run { config } => {
            let text = fs::read_to_string(&config).map_err(|e| format!("cannot read {}: {e}", config.display()))?;
            match serde_json::from_str::<ExperimentConfig>(&text) {
                Ok(cfg) => cfg,
                Err(config_err) => match serde_json::from_str::<ReportDocument>(&text) {
                    Ok(doc) => doc.config,
                    Err(_) => return Err(format!("{}: {config_err}", config.display())),
                },
            }
        }
    })
}

fn emit(docs: &[ReportDocument], format: OutputFormat, sweep: bool) -> io::Result<()> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match format {
        OutputFormat::Json => {
            let text = if sweep { serde_json::to_string_pretty(docs) } else { serde_json::to_string_pretty(&docs[0]) };
            writeln!(out, "{}", text.map_err(io::Error::other)?)?;
        }
        OutputFormat::Csv => {
            let constants = docs.iter().find_map(|d| match &d.payload {
                Some(Payload::Constants { constants }) => Some(constants),
                _ => None,
            });
            let written = match constants {
                Some(table) => write_constants_csv(&mut out, table),
                None => write_csv(&mut out, docs),
            };
            written.map_err(io::Error::other)?;
        }
    }
    out.flush()
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let format = match cli.format {
        Format::Json => OutputFormat::Json,
        Format::Csv => OutputFormat::Csv,
    };
    let mut cfg = match to_config(cli.command) {
        Ok(cfg) => cfg,
        Err(message) => {
            eprintln!("error: {message}");
            return ExitCode::from(1);
        }
    };
    cfg.format = format;
    let sweep = cfg.command == Command::Sweep;
    let docs = run(cfg, cli.timing);
    for doc in &docs {
        if let Some(err) = &doc.error {
            eprintln!("error ({}): {}", err.kind, err.message);
        }
    }
    if let Err(e) = emit(&docs, format, sweep) {
        eprintln!("error: cannot write output: {e}");
        return ExitCode::from(1);
    }
    ExitCode::from(batch_exit_code(&docs) as u8)
}
