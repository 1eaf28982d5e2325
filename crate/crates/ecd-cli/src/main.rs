//! `ecd`: command-line front end for the energy-conserving descent library.
//!
//! Subcommands: `run` (one seeded optimizer run), `sweep` (a batch of seeded
//! runs), `basins` (the two-basin mixing experiment), `volume` (phase-space
//! volume prediction), `compare` (two optimizers on one objective, joined
//! loss-versus-step CSV).
//!
//! Exit codes: 0 success, 2 usage/config error, 3 analysis failure,
//! 4 divergence.

mod commands;
mod config;

use clap::{Parser, Subcommand};
use commands::{cmd_basins, cmd_compare, cmd_run, cmd_sweep, cmd_volume, CliError};

#[derive(Parser)]
#[command(name = "ecd", version, about = "Energy-conserving descent optimization runner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute one seeded optimizer run and write its summary and trace.
    Run(commands::RunArgs),
    /// Execute a batch of independent seeded runs.
    Sweep(commands::SweepArgs),
    /// Run the two-basin mixing experiment and tally basin convergence.
    Basins(commands::BasinsArgs),
    /// Predict the phase-space volume ratio of the two-basin landscape.
    Volume(commands::VolumeArgs),
    /// Run two optimizers on the same objective and start, side by side.
    Compare(commands::CompareArgs),
}

fn main() {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run(args) => cmd_run(&args),
        Command::Sweep(args) => cmd_sweep(&args),
        Command::Basins(args) => cmd_basins(&args),
        Command::Volume(args) => cmd_volume(&args),
        Command::Compare(args) => cmd_compare(&args),
    };
    match outcome {
        Ok(()) => {}
        Err(CliError { code, message }) => {
            eprintln!("error: {message}");
            std::process::exit(code);
        }
    }
}
