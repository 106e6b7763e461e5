//! Experiment runner for the `proxmcmc` toolkit.
//!
//! Each subcommand reads a flat `key = value` configuration (see
//! [`config`]), applies command-line overrides and writes CSV, JSON and PGM
//! results into the output directory. Wall-clock measurements go to a
//! separate `timing.json` so every other file is byte-reproducible for a
//! given configuration and seed.

pub mod chain;
pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use config::{Experiment, ExperimentConfig};
use error::{CliError, CliResult};
use output::OutputDir;

#[derive(Debug, Parser)]
#[command(name = "proxmcmc", version, about = "Proximal MCMC experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sampler stability on one-dimensional benchmark densities.
    Benchmark1d(CommonArgs),
    /// TV-regularised image deconvolution with credibility maps.
    Deconvolve(CommonArgs),
    /// Nuclear-norm matrix denoising and sampler comparison.
    DenoiseLowrank(CommonArgs),
    /// Proximal operators against brute-force maximisation.
    ProxCheck(CommonArgs),
    /// ACF, ESS and quantiles of a stored chain CSV.
    Diagnose(CommonArgs),
}

#[derive(Debug, Args, Clone, Default)]
pub struct CommonArgs {
    /// Configuration file with `key = value` lines.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// RNG seed (overrides the configuration).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory (overrides the configuration).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Override one configuration key; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
}

impl Command {
    pub fn split(&self) -> (Experiment, &CommonArgs) {
        match self {
            Command::Benchmark1d(a) => (Experiment::Benchmark1d, a),
            Command::Deconvolve(a) => (Experiment::Deconvolve, a),
            Command::DenoiseLowrank(a) => (Experiment::DenoiseLowrank, a),
            Command::ProxCheck(a) => (Experiment::ProxCheck, a),
            Command::Diagnose(a) => (Experiment::Diagnose, a),
        }
    }
}

/// Effective configuration: file, then `--set` pairs, then `--seed`/`--out`.
pub fn resolve_config(experiment: Experiment, args: &CommonArgs) -> CliResult<ExperimentConfig> {
    let mut cfg = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
            ExperimentConfig::parse(experiment, &text)?
        }
        None => ExperimentConfig::defaults(experiment),
    };
    for pair in &args.set {
        cfg.apply_override(pair)?;
    }
    if let Some(seed) = args.seed {
        cfg.set("seed", &seed.to_string())?;
    }
    if let Some(out) = &args.out {
        cfg.set("out", &out.to_string_lossy())?;
    }
    Ok(cfg)
}

/// Runs an experiment and writes `config.txt` next to its results.
pub fn run_experiment(cfg: &ExperimentConfig) -> CliResult<()> {
    let out = OutputDir::create(cfg.raw("out")?)?;
    out.text("config.txt", &cfg.to_text())?;
    match cfg.experiment() {
        Experiment::Benchmark1d => commands::benchmark1d::run(cfg, &out).map(drop),
        Experiment::Deconvolve => commands::deconvolve::run(cfg, &out).map(drop),
        Experiment::DenoiseLowrank => commands::denoise_lowrank::run(cfg, &out).map(drop),
        Experiment::ProxCheck => commands::prox_check::run(cfg, &out).map(drop),
        Experiment::Diagnose => commands::diagnose::run(cfg, &out).map(drop),
    }
}

/// Caps the rayon pool at `PROXMCMC_THREADS` when it is set.
pub fn configure_threads() -> CliResult<()> {
    if let Ok(raw) = std::env::var("PROXMCMC_THREADS") {
        let n: usize = raw.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
            CliError::usage(format!(
                "PROXMCMC_THREADS must be a positive integer, got '{raw}'"
            ))
        })?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::usage(format!("thread pool: {e}")))?;
    }
    Ok(())
}
