//! `wow-uwb`: batch synthesis, analysis and parameter fitting for the
//! hurricane UWB channel model.

mod commands;
mod config;
mod output;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::config::{CliError, Settings};

#[derive(Parser)]
#[command(name = "wow-uwb", version, about = "Hurricane UWB channel simulator and estimation toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Synthesize a scan ensemble and its matched reference scans.
    Synth(Flags),
    /// Derive PDPs, attenuation, MPC counts, clusters and K-factors from a synth output.
    Analyze(Flags),
    /// Run every estimator over a synth output and compare with the parameter column.
    Fit(Flags),
    /// Synthesize, fit and check the estimates against tolerances.
    Roundtrip(Flags),
}

/// Flags shared by all subcommands. Values in `--config` take precedence.
#[derive(Args, Debug, Default)]
pub struct Flags {
    /// Scenario column, e.g. "P1,S1".
    #[arg(long)]
    scenario: Option<String>,
    /// Number of scans.
    #[arg(long)]
    scans: Option<usize>,
    /// Master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<std::path::PathBuf>,
    /// Directory written by `synth` (analyze, fit).
    #[arg(long)]
    input: Option<std::path::PathBuf>,
    /// Parameter-set JSON overriding the built-in tables.
    #[arg(long)]
    params: Option<std::path::PathBuf>,
    /// Pulse template, one sample per line.
    #[arg(long)]
    template: Option<std::path::PathBuf>,
    /// Relative tolerance applied to every relative round-trip check.
    #[arg(long)]
    tolerance: Option<f64>,
    /// Comma-separated wind velocities (mph) to cycle through.
    #[arg(long, value_delimiter = ',')]
    velocities: Option<Vec<f64>>,
    /// Also render each scan with the pulse template (synth).
    #[arg(long)]
    waveforms: bool,
    /// Worker threads (defaults to all cores); never changes the output.
    #[arg(long)]
    workers: Option<usize>,
    /// JSON run configuration; its values override flags.
    #[arg(long)]
    config: Option<std::path::PathBuf>,
}

fn run(cli: Cli) -> Result<ExitCode, CliError> {
    let (flags, run): (&Flags, fn(&Settings) -> Result<ExitCode, CliError>) = match &cli.command {
        Command::Synth(f) => (f, commands::synth::run),
        Command::Analyze(f) => (f, commands::analyze::run),
        Command::Fit(f) => (f, commands::fit::run),
        Command::Roundtrip(f) => (f, commands::roundtrip::run),
    };
    let settings = Settings::resolve(flags)?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = settings.workers {
        if n == 0 {
            return Err(CliError::Usage("--workers must be at least 1".into()));
        }
        pool = pool.num_threads(n);
    }
    let pool = pool.build().map_err(|e| CliError::Runtime(e.into()))?;
    pool.install(|| run(&settings))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
