//! Driver for the `periods` binary: configuration, the worker pool and the
//! four subcommands. Each subcommand writes files into the output directory
//! and nothing else; outputs depend only on the config and the seed.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::path::PathBuf;

use clap::{Parser, Subcommand};
use periods_core::CountMode;

pub use config::RunConfig;
pub use error::CliError;
use output::OutDir;

#[derive(Debug, Parser)]
#[command(name = "periods", version, about = "Spectral periods of free-group representations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// TOML run configuration; built-in defaults when omitted.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads; 0 uses every core.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Output directory (default `out`).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub max_len: Option<usize>,
    /// `all` or `primitive`.
    #[arg(long, global = true)]
    pub mode: Option<CountMode>,
}

#[derive(Clone, Copy, Debug, Subcommand)]
pub enum Command {
    /// List conjugacy classes in canonical form.
    Enumerate,
    /// Periods, Cartan values, Gromov terms and proximality per class.
    Spectra,
    /// Residual suites for the cocycle, Gromov and period identities.
    Verify,
    /// Growth fit, central-limit harness, proximal fraction and Benoist defects.
    Clt,
}

impl Cli {
    /// The file config (or defaults) with command-line overrides applied.
    pub fn resolve(&self) -> Result<RunConfig, CliError> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        if let Some(s) = self.seed {
            cfg.run.seed = s;
        }
        if let Some(w) = self.workers {
            cfg.run.workers = w;
        }
        if let Some(o) = &self.out {
            cfg.run.out = Some(o.clone());
        }
        if let Some(n) = self.max_len {
            cfg.enumeration.max_len = n;
        }
        if let Some(m) = self.mode {
            cfg.enumeration.mode = m;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Runs one subcommand on its own pool of `cfg.run.workers` threads.
pub fn execute(command: Command, cfg: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.run.workers)
        .build()
        .map_err(|e| CliError::Config(format!("cannot start {} workers: {e}", cfg.run.workers)))?;
    let dir = cfg.run.out.clone().unwrap_or_else(|| PathBuf::from("out"));
    let out = OutDir::create(&dir, cfg.hash())?;
    pool.install(|| match command {
        Command::Enumerate => commands::enumerate(cfg, &out),
        Command::Spectra => commands::spectra(cfg, &out),
        Command::Verify => commands::verify(cfg, &out),
        Command::Clt => commands::clt(cfg, &out),
    })
}

pub fn run(cli: &Cli) -> Result<Vec<PathBuf>, CliError> {
    execute(cli.command, &cli.resolve()?)
}
