//! `bohmfree`: inspect the catalog, build states, verify them and evolve them.
//!
//! Exit codes: 0 when every check passed, 1 when checks ran and failed,
//! 2 for configuration, domain and I/O errors.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};

use commands::Global;
use config::{Format, RunConfig};

#[derive(Debug, Parser)]
#[command(name = "bohmfree", version, about = "States whose phase is a free classical action")]
struct Cli {
    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Multiplies every calibrated residual tolerance.
    #[arg(long, global = true)]
    tol_scale: Option<f64>,
    /// Catalog tag; overrides family.tag in the config.
    #[arg(long, global = true)]
    family: Option<String>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// List the twelve families.
    Catalog,
    /// Write a state table and its metadata sidecar.
    Build,
    /// Run the residual checks and print a JSON report.
    Verify,
    /// Crank–Nicolson evolution with snapshot tables and a summary.
    Evolve {
        /// Evolve with V = 0 instead of the family's potential.
        #[arg(long)]
        zero_potential: bool,
    },
    /// Verify every point of the configured parameter ranges.
    Sweep,
}

fn run(cli: Cli) -> Result<bool> {
    let config = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let g = Global {
        config,
        family: cli.family,
        format: cli.format,
        out: cli.out,
        tol_scale: cli.tol_scale,
    };
    match cli.command {
        Command::Catalog => commands::cmd_catalog(&g),
        Command::Build => commands::cmd_build(&g),
        Command::Verify => commands::cmd_verify(&g),
        Command::Evolve { zero_potential } => commands::cmd_evolve(&g, zero_potential),
        Command::Sweep => commands::cmd_sweep(&g),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
