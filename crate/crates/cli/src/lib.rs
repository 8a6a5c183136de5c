//! `curlforce`: runs the curl-force experiments from a JSON config and
//! writes CSV data plus a JSON manifest per run.
//!
//! ```text
//! curlforce <simulate|figure|map-ef|noether|orbit|special|sweep> \
//!     --config <path> --out <dir> [--variant derived|as_printed] [--format csv|json]
//! ```
//!
//! Exit codes: 0 success, 1 usage or config error, 2 numerical failure.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use curlforce_core::Variant;

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

pub use commands::{execute, Context};
pub use config::{Command, FigureKind, RunConfig};
pub use error::{CliError, Result};
pub use output::{Format, Manifest};

/// Environment variable overriding the integrator step cap.
pub const MAX_STEPS_ENV: &str = "CURLFORCE_MAX_STEPS";

#[derive(Debug, Parser)]
#[command(
    name = "curlforce",
    version,
    about = "Curl-force dynamics and Emden-Fowler reductions"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: CliCommand,
}

#[derive(Debug, Subcommand)]
pub enum CliCommand {
    /// Integrate the polar equations of motion.
    Simulate(RunArgs),
    /// Emit ψ(θ) data for one of the three figures.
    Figure(FigureArgs),
    /// Map a polar run to Emden-Fowler variables and check the residual.
    MapEf(RunArgs),
    /// Check a Noether symmetry and the drift of its integral.
    Noether(RunArgs),
    /// Orbit and time quadratures along the particular branch.
    Orbit(RunArgs),
    /// Special solutions and the scaling map of the drag family.
    Special(RunArgs),
    /// Run several configs concurrently.
    Sweep(RunArgs),
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    #[arg(long, value_parser = parse_variant)]
    pub variant: Option<Variant>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct FigureArgs {
    #[command(flatten)]
    pub run: RunArgs,
    #[arg(long, value_enum)]
    pub which: Option<FigureKind>,
}

fn parse_variant(s: &str) -> std::result::Result<Variant, String> {
    s.parse().map_err(|e: curlforce_core::Error| e.to_string())
}

fn max_steps_from_env() -> Result<Option<usize>> {
    match std::env::var(MAX_STEPS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&n| n > 0)
            .map(Some)
            .ok_or_else(|| CliError::Config(format!("{MAX_STEPS_ENV} must be a positive integer, got '{v}'"))),
        Err(_) => Ok(None),
    }
}

/// Parses nothing; runs an already parsed command line.
pub fn run(cli: Cli) -> Result<()> {
    let (command, args, which) = match cli.command {
        CliCommand::Simulate(a) => (Command::Simulate, a, None),
        CliCommand::Figure(f) => (Command::Figure, f.run, f.which),
        CliCommand::MapEf(a) => (Command::MapEf, a, None),
        CliCommand::Noether(a) => (Command::Noether, a, None),
        CliCommand::Orbit(a) => (Command::Orbit, a, None),
        CliCommand::Special(a) => (Command::Special, a, None),
        CliCommand::Sweep(a) => (Command::Sweep, a, None),
    };
    let cfg = match &args.config {
        Some(path) => RunConfig::load(path)?,
        None if command == Command::Figure => RunConfig {
            name: "figure".into(),
            ..RunConfig::default()
        },
        None => return Err(CliError::Config(format!("{} needs --config", command.as_str()))),
    };
    let ctx = Context {
        out_dir: args.out,
        variant: args.variant,
        format: args.format,
        max_steps: max_steps_from_env()?,
        which,
    };
    execute(command, &cfg, &ctx)
}
