//! `sqg`: run simulations, inequality checks, decay experiments and sweeps.
//!
//! Exit status: 0 pass, 1 a check failed, 2 usage or config error,
//! 3 numerical instability, 4 smallness gate refused the data.
//! `SQG_WORKERS` sets the worker-thread count.

mod commands;
mod config;
mod failure;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::commands::{parse_count, SweepArgs, VerifyArgs};
use crate::config::Overrides;
use crate::failure::Failure;

#[derive(Parser)]
#[command(name = "sqg", version, about = "Dissipative SQG solver and estimate checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate one run and check its energy ledgers.
    Simulate {
        /// TOML run configuration; defaults apply when omitted.
        #[arg(short, long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        overrides: Overrides,
        #[arg(short, long, default_value = "sqg-out")]
        out: PathBuf,
    },
    /// Sample inequality checks and report fitted constants.
    Verify {
        /// Lemma ids (full or numeric prefix such as `2.3`), or `all`.
        lemmas: Vec<String>,
        /// Ensemble size; accepts `1e6`. Defaults depend on the lemma.
        #[arg(long, value_parser = parse_count)]
        samples: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 64)]
        n: usize,
        #[arg(long, default_value_t = 0.25)]
        alpha: f64,
        #[arg(short, long, default_value = "sqg-out")]
        out: PathBuf,
    },
    /// Run the frequency-split decay diagnostics on one run.
    Decay {
        #[arg(short, long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        overrides: Overrides,
        /// Run even when the data fail the smallness gate.
        #[arg(long)]
        force: bool,
        #[arg(short, long, default_value = "sqg-out")]
        out: PathBuf,
    },
    /// Grid of runs over alpha, amplitude (fraction of eps0) and n.
    Sweep {
        #[arg(short, long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        overrides: Overrides,
        #[arg(long = "alphas", value_delimiter = ',')]
        alphas: Vec<f64>,
        #[arg(long = "amplitudes", value_delimiter = ',')]
        amplitudes: Vec<f64>,
        #[arg(long = "sizes", value_delimiter = ',')]
        sizes: Vec<usize>,
        #[arg(short, long, default_value = "sqg-out")]
        out: PathBuf,
    },
}

fn init_workers() -> Result<(), Failure> {
    let Ok(raw) = std::env::var("SQG_WORKERS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::Usage(format!("SQG_WORKERS must be a positive integer, got `{raw}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::Usage(e.to_string()))
}

fn run(cli: Cli) -> Result<(), Failure> {
    init_workers()?;
    match cli.command {
        Command::Simulate { config, overrides, out } => commands::simulate_cmd(config.as_deref(), &overrides, &out),
        Command::Verify { lemmas, samples, seed, n, alpha, out } => commands::verify_cmd(VerifyArgs {
            ids: &lemmas,
            samples,
            seed,
            n,
            alpha,
            out: &out,
        }),
        Command::Decay { config, overrides, force, out } => {
            commands::decay_cmd(config.as_deref(), &overrides, force, &out)
        }
        Command::Sweep { config, overrides, alphas, amplitudes, sizes, out } => commands::sweep_cmd(SweepArgs {
            config: config.as_deref(),
            overrides: &overrides,
            alphas: &alphas,
            amplitudes: &amplitudes,
            ns: &sizes,
            out: &out,
        }),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("sqg: {f}");
            f.exit()
        }
    }
}
