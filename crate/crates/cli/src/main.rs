//! `fdrs`: outage, throughput, feasibility and diversity experiments for
//! full-duplex relay selection from scenario files.
//!
//! Exit status is 0 on success, 1 for configuration or usage errors and 2
//! for numerical failures or a failed validation.

mod commands;
mod config;
mod manifest;

use clap::{Args, Parser, Subcommand};
use fdrs_core::analysis::{Axis, SweepMethod};
use fdrs_core::Protocol;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug, Parser)]
#[command(name = "fdrs", version, about = "Full-duplex relay selection outage analysis")]
struct Cli {
    /// Write data here and the run manifest to `<FILE>.manifest.json`
    /// instead of stdout and stderr.
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Outage probability and throughput of one protocol as JSON.
    Outage(OutageArgs),
    /// CSV table over a swept parameter.
    Sweep(SweepArgs),
    /// Distribution of the number of interference-feasible relays.
    Pl(PlArgs),
    /// High-power slope of the outage curve as JSON.
    Diversity(DiversityArgs),
    /// Closed form against simulation for every full-duplex protocol.
    Validate(ValidateArgs),
}

#[derive(Debug, Args)]
struct Sim {
    #[arg(long, default_value_t = 1_000_000)]
    trials: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Debug, Args)]
struct OutageArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    protocol: Protocol,
    /// Source rate in bits per channel use.
    #[arg(long)]
    rate: f64,
    /// Apply the interference constraint of the `[cognitive]` section.
    #[arg(long)]
    cognitive: bool,
    #[arg(long, default_value = "analytic")]
    method: SweepMethod,
    #[command(flatten)]
    sim: Sim,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[arg(long)]
    config: PathBuf,
    /// power_db, rate_bpcu, relay_count or ith_db.
    #[arg(long)]
    axis: Axis,
    #[arg(long, allow_negative_numbers = true)]
    from: f64,
    #[arg(long, allow_negative_numbers = true)]
    to: f64,
    #[arg(long, default_value_t = 11)]
    steps: usize,
    /// Comma-separated, e.g. `ndl,idl,idl_dt,sdf,hd_mrc,hd_sdf`.
    #[arg(long, value_delimiter = ',', required = true)]
    protocols: Vec<Protocol>,
    #[arg(long, default_value = "analytic")]
    method: SweepMethod,
    /// Source rate wherever the rate is not the swept axis.
    #[arg(long, default_value_t = 2.0)]
    rate: f64,
    #[arg(long)]
    cognitive: bool,
    #[command(flatten)]
    sim: Sim,
}

#[derive(Debug, Args)]
struct PlArgs {
    #[arg(long)]
    config: PathBuf,
    /// Also simulate with this many trials.
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

#[derive(Debug, Args)]
struct DiversityArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    protocol: Protocol,
    #[arg(long, allow_negative_numbers = true)]
    pmin_db: f64,
    #[arg(long, allow_negative_numbers = true)]
    pmax_db: f64,
    #[arg(long, default_value_t = 21)]
    points: usize,
    #[arg(long, default_value_t = 2.0)]
    rate: f64,
    #[arg(long)]
    cognitive: bool,
    #[arg(long, default_value = "analytic")]
    method: SweepMethod,
    #[command(flatten)]
    sim: Sim,
}

#[derive(Debug, Args)]
struct ValidateArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    rate: f64,
    #[arg(long, default_value_t = 1_000_000)]
    trials: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Defaults to every full-duplex protocol the scenario supports.
    #[arg(long, value_delimiter = ',')]
    protocols: Vec<Protocol>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
