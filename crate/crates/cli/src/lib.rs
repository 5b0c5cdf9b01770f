//! Command-line front end: run configuration, simulation outputs, offline
//! diagnosis of snapshot directories and verification reports.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

pub use config::RunConfig;
pub use error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(name = "regwatch", version, about = "Spectral Navier-Stokes runs with regularity diagnostics")]
pub struct Cli {
    /// Run configuration (TOML).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory; overrides `output_dir` from the configuration.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Seed for random initial data; overrides `seed` from the configuration.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads; 1 gives bit-reproducible reductions.
    #[arg(long, global = true, env = "REGWATCH_THREADS")]
    pub threads: Option<usize>,
    /// Multiplies every verification tolerance.
    #[arg(long, global = true, default_value_t = 1.0)]
    pub tolerance_scale: f64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate the configured run and write snapshots, diagnostics and a manifest.
    Simulate,
    /// Recompute criterion norms from a snapshot directory.
    Diagnose {
        /// Directory holding `.rgw` snapshots, directly or under `snapshots/`.
        snapshots: PathBuf,
    },
    /// Run the configured checks on a snapshot directory, or on a fresh run when none is given.
    Verify { snapshots: Option<PathBuf> },
}

fn load_config(cli: &Cli, fallback_dir: Option<&Path>) -> CliResult<RunConfig> {
    let path = match (&cli.config, fallback_dir) {
        (Some(p), _) => p.clone(),
        (None, Some(dir)) => dir.join(commands::CONFIG_COPY),
        (None, None) => return Err(CliError::Config("--config is required".into())),
    };
    let mut cfg = RunConfig::load(&path)?;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

fn output_dir(cli: &Cli, cfg: &RunConfig, default: Option<PathBuf>) -> CliResult<PathBuf> {
    cli.out
        .clone()
        .or(default)
        .or_else(|| cfg.output_dir.clone())
        .ok_or_else(|| CliError::Config("no output directory: pass --out or set output_dir".into()))
}

pub fn run(cli: &Cli) -> CliResult<()> {
    if let Some(threads) = cli.threads {
        if threads == 0 {
            return Err(CliError::Config("--threads must be ≥ 1".into()));
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            log::warn!("thread pool already initialised: {e}");
        }
    }
    match &cli.command {
        Command::Simulate => {
            let cfg = load_config(cli, None)?;
            let out = output_dir(cli, &cfg, None)?;
            let outcome = commands::simulate(&cfg, &out)?;
            println!("wrote {} files and {}", outcome.files.len(), outcome.manifest.display());
        }
        Command::Diagnose { snapshots } => {
            let cfg = load_config(cli, Some(snapshots))?;
            let out = cli.out.clone().unwrap_or_else(|| snapshots.join("diagnose"));
            let summary = commands::diagnose(snapshots, &cfg, &out)?;
            for (k, v) in summary.entries() {
                println!("{k} = {v}");
            }
        }
        Command::Verify { snapshots } => {
            let cfg = load_config(cli, snapshots.as_deref())?;
            let (source, default) = match snapshots {
                Some(dir) => (commands::VerifySource::Snapshots(dir.clone()), Some(dir.join("verify"))),
                None => (commands::VerifySource::Live, cfg.output_dir.as_ref().map(|d| d.join("verify"))),
            };
            let out = output_dir(cli, &cfg, default)?;
            let outcome = commands::verify(&source, &cfg, &out, cli.tolerance_scale)?;
            if outcome.failed > 0 {
                return Err(CliError::ChecksFailed { failed: outcome.failed, total: outcome.total });
            }
            println!("all {} checks passed", outcome.total);
        }
    }
    Ok(())
}
