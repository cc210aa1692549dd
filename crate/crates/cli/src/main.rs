//! Configuration-driven frontend for spectra, framings, verification suites
//! and field export on flat and conformally-flat 3-tori.

mod commands;
mod config;
mod errors;
mod fields_io;
mod report;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use config::JobConfig;
use errors::CliResult;

#[derive(Parser)]
#[command(
    name = "spinframe",
    version,
    about = "Dirac eigenspinors and divergence-free framings on flat and conformally-flat 3-tori"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the low spectrum, residuals and cluster structure
    Spectrum(RunArgs),
    /// Build a framing from an eigenspinor and certify it
    Framing(RunArgs),
    /// Run the invariant suite (commutation, evenness, kernel, dense oracle)
    Verify(RunArgs),
    /// Convert computed framing fields to CSV and legacy VTK
    Export(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Path to the JSON job configuration
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides the config's output.dir)
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the solver seed from the config
    #[arg(long)]
    seed: Option<u64>,
    /// Force the dense cross-check (rejects grids above the dense cap)
    #[arg(long)]
    dense_oracle: bool,
}

fn run(cli: Cli) -> CliResult<i32> {
    match cli.command {
        Command::Spectrum(a) => {
            let cfg = JobConfig::load(&a.config)?;
            commands::cmd_spectrum(&cfg, a.out.as_deref(), a.seed)
        }
        Command::Framing(a) => {
            let cfg = JobConfig::load(&a.config)?;
            commands::cmd_framing(&cfg, a.out.as_deref(), a.seed)
        }
        Command::Verify(a) => {
            let cfg = JobConfig::load(&a.config)?;
            commands::cmd_verify(&cfg, a.out.as_deref(), a.seed, a.dense_oracle)
        }
        Command::Export(a) => {
            let cfg = JobConfig::load(&a.config)?;
            commands::cmd_export(&cfg, a.out.as_deref())
        }
    }
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            println!("{}", e.to_json());
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}
