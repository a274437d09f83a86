//! `fracshe` — simulation laboratory for the stochastic fractional heat
//! equation with Riesz-colored noise.
//!
//! Exit codes: 0 success, 1 experiment failure, 2 configuration error,
//! 3 numeric error.

mod config;
mod manifest;
mod runner;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::ExperimentConfig;
use fracshe_core::error::Error;

#[derive(Parser)]
#[command(
    name = "fracshe",
    version,
    about = "Fractional stochastic heat equation laboratory"
)]
struct Cli {
    /// Override the ensemble seed (env: FRACSHE_SEED).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for ensembles (env: FRACSHE_THREADS). Output is
    /// bitwise-identical for any thread count.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Artifact directory (env: FRACSHE_OUTPUT_DIR, default ./runs).
    #[arg(long, global = true)]
    output_dir: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the model constants for one parameter set.
    Constants {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        gamma: f64,
        #[arg(long)]
        dim: usize,
        /// Flat JSON object keyed by constant name instead of a table.
        #[arg(long)]
        json: bool,
    },
    /// Evaluate the fractional Green kernel on a grid, CSV to stdout.
    Kernel {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        t: f64,
        #[arg(long, default_value_t = 1)]
        dim: usize,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        extent: f64,
    },
    /// Sample fractional Brownian motion paths, CSV to stdout.
    Fbm {
        #[arg(long)]
        hurst: f64,
        /// Increments per path.
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        samples: u64,
        /// Emit summary statistics (JSON) instead of the paths.
        #[arg(long)]
        summary: bool,
    },
    /// Run the solver ensemble described by a JSON config file.
    Simulate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run one verification experiment from a JSON config file.
    Verify {
        /// clt | lil | variation | localize | holder
        experiment: String,
        #[arg(long)]
        config: PathBuf,
    },
    /// Re-run a recorded run and compare artifacts byte-for-byte.
    Replay { run_id: String },
}

fn env_u64(name: &str) -> Option<u64> {
    std::env::var(name).ok().and_then(|v| v.parse().ok())
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Config(_) | Error::ParameterDomain(_) => 2,
        _ => 3,
    }
}

fn load_config(path: &PathBuf) -> Result<ExperimentConfig, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    ExperimentConfig::parse(&text)
}

fn run(cli: Cli) -> Result<bool, Error> {
    let seed = cli.seed.or_else(|| env_u64("FRACSHE_SEED"));
    let threads = cli
        .threads
        .or_else(|| env_u64("FRACSHE_THREADS").map(|v| v as usize));
    let output_dir = cli
        .output_dir
        .or_else(|| std::env::var("FRACSHE_OUTPUT_DIR").ok().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("runs"));
    if let Some(t) = threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    }

    match cli.command {
        Command::Constants {
            alpha,
            gamma,
            dim,
            json,
        } => {
            print!("{}", runner::constants_command(alpha, gamma, dim, json)?);
            Ok(true)
        }
        Command::Kernel {
            alpha,
            t,
            dim,
            n,
            extent,
        } => {
            print!("{}", runner::kernel_command(alpha, t, dim, n, extent)?);
            Ok(true)
        }
        Command::Fbm {
            hurst,
            n,
            samples,
            summary,
        } => {
            print!(
                "{}",
                runner::fbm_command(hurst, n, samples, seed.unwrap_or(0), summary)?
            );
            Ok(true)
        }
        Command::Simulate { config } => {
            let cfg = load_config(&config)?;
            let res = runner::simulate_command(&cfg, &output_dir, seed)?;
            print!("{}", res.summary);
            Ok(res.pass)
        }
        Command::Verify { experiment, config } => {
            let cfg = load_config(&config)?;
            let res = runner::verify_command(&experiment, &cfg, &output_dir, seed)?;
            print!("{}", res.summary);
            Ok(res.pass)
        }
        Command::Replay { run_id } => {
            let res = runner::replay_command(&run_id, &output_dir)?;
            print!("{}", res.summary);
            Ok(res.pass)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(err) => {
            // machine-readable error on stderr
            eprintln!("{{\"error\": \"{}\"}}", err.to_string().replace('"', "'"));
            ExitCode::from(exit_code_for(&err))
        }
    }
}
