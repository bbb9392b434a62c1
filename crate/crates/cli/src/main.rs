mod commands;
mod config;
mod dataset;
mod error;
mod report;

use clap::{Parser, Subcommand};
use commands::{CompareArgs, DistArgs, GroupTestArgs, MeanArgs, SimulateArgs};
use config::RunConfig;
use error::CliResult;
use std::process::ExitCode;

/// Scaling-rotation means, distances and bootstrap comparisons for SPD matrices.
#[derive(Debug, Parser)]
#[command(name = "scarot", version)]
struct Cli {
    #[command(flatten)]
    config: RunConfig,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sample PSR mean, its orbit and certificates.
    Mean(MeanArgs),
    /// Scaling-rotation or partial scaling-rotation distances.
    Dist(DistArgs),
    /// Draw a synthetic 2x2 dataset and summarize its means.
    Simulate(SimulateArgs),
    /// Log-Euclidean and PSR coordinates of a dataset and its means, as CSV.
    Compare(CompareArgs),
    /// Bootstrap comparison of two datasets.
    GroupTest(GroupTestArgs),
}

fn configure_threads() -> CliResult<()> {
    let Ok(value) = std::env::var("SCAROT_THREADS") else {
        return Ok(());
    };
    let n: usize = value
        .parse()
        .map_err(|_| error::CliError::Parse(format!("SCAROT_THREADS must be a positive integer, got {value:?}")))?;
    // A second initialization can only fail if a pool already exists.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn run(cli: &Cli) -> CliResult<()> {
    configure_threads()?;
    let stdout = &mut std::io::stdout().lock();
    match &cli.command {
        Command::Mean(a) => commands::mean(a, &cli.config, stdout),
        Command::Dist(a) => commands::dist(a, &cli.config, stdout),
        Command::Simulate(a) => commands::simulate(a, &cli.config, stdout),
        Command::Compare(a) => commands::compare(a, &cli.config, stdout),
        Command::GroupTest(a) => commands::group_test(a, &cli.config, stdout),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("scarot: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
