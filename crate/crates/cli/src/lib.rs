//! Command-line front end for the `adjmech` library.

pub mod commands;
pub mod config;
pub mod error;
pub mod format;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::commands::BetaGrid;
use crate::config::{FileConfig, FlagOverrides, RunConfig, SEED_ENV};
use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "adjmech", version, about = "Type-adjustment mechanism analyses")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Profit-maximizing adjustment cost.
    OptimizeCost(CommonArgs),
    /// Check that bidding half the adjusted type is an equilibrium.
    VerifyBne(CommonArgs),
    /// Optimal reserve auction benchmark.
    BaselineMyerson(CommonArgs),
    /// CSV of the optimum over a grid of beta values.
    Sweep {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, default_value_t = 0.0)]
        beta_min: f64,
        #[arg(long, default_value_t = 5.0)]
        beta_max: f64,
        #[arg(long, default_value_t = 101)]
        beta_steps: usize,
    },
    /// Markdown table of closed forms and simulation checks.
    Report(CommonArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// Flat JSON config; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub agents: Option<usize>,
    #[arg(long)]
    pub cost: Option<f64>,
    #[arg(long)]
    pub reserve: Option<f64>,
    #[arg(long)]
    pub samples: Option<usize>,
    /// Defaults to $ADJMECH_SEED, then 0.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub threads: Option<usize>,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// closed-form, golden-section or derivative-root.
    #[arg(long)]
    pub method: Option<String>,
}

impl CommonArgs {
    fn resolve(&self, default_samples: usize) -> Result<RunConfig, CliError> {
        let file = match &self.config {
            Some(path) => FileConfig::load(path)?,
            None => FileConfig::default(),
        };
        let flags = FlagOverrides {
            agents: self.agents,
            beta: self.beta,
            gamma: self.gamma,
            seed: self.seed,
            samples: self.samples,
            cost: self.cost,
            reserve: self.reserve,
            threads: self.threads,
            method: self.method.clone(),
        };
        let cfg = RunConfig::resolve(file, flags, std::env::var(SEED_ENV).ok(), default_samples)?;
        cfg.validate()?;
        Ok(cfg)
    }
}

pub const VERIFY_DEFAULT_SAMPLES: usize = 100_000;
pub const MC_DEFAULT_SAMPLES: usize = 1_000_000;

fn emit(text: &str, out: Option<&PathBuf>) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::Io(format!("stdout: {e}")))
        }
    }
}

fn in_pool<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, CliError> {
    match threads {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| CliError::Usage(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
        None => Ok(f()),
    }
}

pub fn execute(cli: Cli) -> Result<(), CliError> {
    let (common, default_samples) = match &cli.command {
        Command::OptimizeCost(c) => (c, MC_DEFAULT_SAMPLES),
        Command::VerifyBne(c) => (c, VERIFY_DEFAULT_SAMPLES),
        Command::BaselineMyerson(c) => (c, MC_DEFAULT_SAMPLES),
        Command::Sweep { common, .. } => (common, MC_DEFAULT_SAMPLES),
        Command::Report(c) => (c, MC_DEFAULT_SAMPLES),
    };
    let cfg = common.resolve(default_samples)?;
    let out = common.out.as_ref();
    in_pool(cfg.threads, || match &cli.command {
        Command::OptimizeCost(_) => emit(&commands::optimize_cost_cmd(&cfg)?, out),
        Command::VerifyBne(_) => {
            let (text, pass) = commands::verify_bne_cmd(&cfg)?;
            emit(&text, out)?;
            if pass {
                Ok(())
            } else {
                Err(CliError::VerificationFailed)
            }
        }
        Command::BaselineMyerson(_) => emit(&commands::baseline_cmd(&cfg)?, out),
        Command::Sweep { beta_min, beta_max, beta_steps, .. } => {
            let grid = BetaGrid { min: *beta_min, max: *beta_max, steps: *beta_steps };
            emit(&commands::sweep_cmd(&cfg, grid)?, out)
        }
        Command::Report(_) => emit(&commands::report_cmd(&cfg)?, out),
    })?
}

/// Parses `args` and runs the command, returning the process exit code.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 64 } else { 0 };
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            if !matches!(e, CliError::VerificationFailed) {
                eprintln!("adjmech: {e}");
            }
            e.exit_code()
        }
    }
}
