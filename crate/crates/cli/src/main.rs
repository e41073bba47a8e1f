// Copyright 2026 homog contributors
// SPDX-License-Identifier: Apache-2.0

//! `homog`: sweeps, reservoir-chain convergence runs, GRAPE pulse design,
//! gradient verification and entropy tables for the four-qubit partial-swap
//! homogeniser.
//!
//! Exit codes: 0 success, 1 numeric failure (threshold or tolerance unmet),
//! 2 configuration error.

mod commands;
mod util;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

const EXIT_NUMERIC: u8 = 1;
const EXIT_CONFIG: u8 = 2;

#[derive(Parser)]
#[command(name = "homog", version, about, max_term_width = 100)]
struct Cli {
    /// Cap worker threads (default: available parallelism)
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep the homogeniser circuit over coupling strengths
    Sweep(SweepArgs),
    /// Run an N-reservoir contact chain and report convergence
    Converge(ConvergeArgs),
    /// Design a GRAPE pulse for a named target gate
    Design(DesignArgs),
    /// Verify exact gradients against central finite differences
    Gradcheck(GradcheckArgs),
    /// Emit per-qubit entropy curves over a coupling grid
    Entropy(EntropyArgs),
}

#[derive(Args)]
struct SweepArgs {
    /// Circuit realization: `ideal` or `grape`
    #[arg(long, default_value = "ideal")]
    mode: String,
    /// Coupling grid in degrees, `start:stop:step`
    #[arg(long, default_value = "0:90:10")]
    grid: String,
    /// Rows per grid point
    #[arg(long, default_value_t = 1)]
    repeats: usize,
    /// Normalisation: `none`, `scheme-a` or `scheme-b`
    #[arg(long, default_value = "none")]
    normalise: String,
    /// Directory holding `<gate>.pulse` files (grape mode)
    #[arg(long)]
    pulse_dir: Option<PathBuf>,
    /// Spin-system config file (grape mode; default: crotonic)
    #[arg(long)]
    spin_config: Option<PathBuf>,
    /// Coupling model: `isotropic` or `weak`
    #[arg(long, default_value = "isotropic")]
    coupling_model: String,
    /// Output records file
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ConvergeArgs {
    /// Coupling strength in degrees
    #[arg(long)]
    eta: f64,
    /// Number of reservoir contacts
    #[arg(long)]
    n: usize,
    /// Use the exact polarisation map (any n)
    #[arg(long, conflicts_with = "full")]
    map: bool,
    /// Use full density-matrix evolution (n capped at 9)
    #[arg(long)]
    full: bool,
    /// Initial system polarisation
    #[arg(long, default_value_t = 1.0)]
    fs: f64,
    /// Reservoir polarisation
    #[arg(long, default_value_t = 0.0)]
    fr: f64,
    /// Output file
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct DesignArgs {
    /// Target gate: `identity`, `swap_<xy>`, `swap_ab_cd`,
    /// `pswap_<xy>_<deg>` or `xrot_<deg>`
    #[arg(long)]
    gate: String,
    /// Segment count
    #[arg(long, default_value_t = 3000)]
    segments: usize,
    /// Segment duration in seconds
    #[arg(long, default_value_t = 1e-5)]
    dt: f64,
    /// Fixed RF amplitude in rad/s (default: 2 pi x 10 kHz)
    #[arg(long, default_value_t = std::f64::consts::TAU * 1e4)]
    amplitude: f64,
    /// Fidelity threshold for success
    #[arg(long, default_value_t = 0.99)]
    threshold: f64,
    #[arg(long, default_value_t = 300)]
    max_iters: usize,
    /// RF amplitude scale factors, comma separated
    #[arg(long, default_value = "0.95,1.0,1.05")]
    rf_scales: String,
    /// Hamiltonian ensemble: `single` or `protons` (from the config file)
    #[arg(long, default_value = "single")]
    ensemble: String,
    /// Optimizer: `lbfgs` or `ascent`
    #[arg(long, default_value = "lbfgs")]
    optimizer: String,
    /// Seed for phase initialization
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Spin-system config file (default: crotonic)
    #[arg(long)]
    spin_config: Option<PathBuf>,
    /// Coupling model: `isotropic` or `weak`
    #[arg(long, default_value = "isotropic")]
    coupling_model: String,
    /// Output pulse file
    #[arg(long)]
    out: PathBuf,
    /// Optional per-grid-point fidelity report
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
struct GradcheckArgs {
    /// Segment count of the four-spin instance
    #[arg(long, default_value_t = 50)]
    segments: usize,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Spin-system config file (default: crotonic)
    #[arg(long)]
    spin_config: Option<PathBuf>,
}

#[derive(Args)]
struct EntropyArgs {
    /// Coupling grid in degrees, `start:stop:step`
    #[arg(long, default_value = "0:90:10")]
    grid: String,
    /// Output file
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = homog_core::exec::configure_threads(cli.threads) {
        eprintln!("error: {e}");
        return ExitCode::from(EXIT_CONFIG);
    }
    let outcome = match cli.command {
        Command::Sweep(args) => commands::sweep::run(args),
        Command::Converge(args) => commands::converge::run(args),
        Command::Design(args) => commands::design::run(args),
        Command::Gradcheck(args) => commands::gradcheck::run(args),
        Command::Entropy(args) => commands::entropy::run(args),
    };
    match outcome {
        Ok(commands::Outcome::Success) => ExitCode::SUCCESS,
        Ok(commands::Outcome::NumericFailure(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(EXIT_NUMERIC)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_CONFIG)
        }
    }
}
