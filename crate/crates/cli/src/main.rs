//! `nlheat`: reproducible datasets from the nonlinear heat-machine simulator.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::error::CliError;

#[derive(Parser)]
#[command(name = "nlheat", version, about = "Datasets for nonlinear coherent heat machines, sensors and interferometers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Options shared by every subcommand.
#[derive(Args, Clone, Default)]
pub struct Common {
    /// key=value file; flags override its entries
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output file (default: <subcommand>.<format>)
    #[arg(long, short)]
    pub output: Option<String>,
    /// csv or json
    #[arg(long)]
    pub format: Option<String>,
    /// Cap on worker threads
    #[arg(long)]
    pub threads: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Output/input intensity ratio of one engine block against chi
    Fig3(commands::Fig3Args),
    /// Chained engine blocks with per-stage mode-1f ergotropy
    Cascade(commands::CascadeArgs),
    /// Minimal phase error of the nonlinear interferometer against nbar
    Fig6(commands::Fig6Args),
    /// Efficiency trace eta(t) of one black-box process
    Fig8a(commands::Fig8aArgs),
    /// Maximal efficiency against nbar for several processes
    Fig8b(commands::Fig8bArgs),
    /// Identify the process behind a measured efficiency trace
    Identify(commands::IdentifyArgs),
    /// Ergotropy report of a single-mode state
    Ergotropy(commands::ErgotropyArgs),
}

fn run(cli: Cli) -> Result<String, CliError> {
    match cli.command {
        Command::Fig3(a) => commands::fig3(a),
        Command::Cascade(a) => commands::cascade(a),
        Command::Fig6(a) => commands::fig6(a),
        Command::Fig8a(a) => commands::fig8a(a),
        Command::Fig8b(a) => commands::fig8b(a),
        Command::Identify(a) => commands::identify(a),
        Command::Ergotropy(a) => commands::ergotropy(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("nlheat: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
