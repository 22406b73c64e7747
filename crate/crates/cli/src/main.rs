//! `zenograv`: reproducible tables and figures from the command line.
//!
//! Exit codes: 0 success, 2 validation error, 3 numerical failure, 4 I/O error.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use config::{CliError, Command, Universal};

const THREADS_VAR: &str = "ZENOGRAV_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "zenograv",
    version,
    about = "Scattering, Zeno and decoherence calculations for a delocalized gravitational source",
    after_help = "Parameters are given as a JSON file (--config) and/or flat overrides `--key value` after the \
                  subcommand; nested keys use dots (--env.pressure 1e-12). Flags override the file. \
                  ZENOGRAV_THREADS caps the worker threads."
)]
struct Cli {
    command: Command,
    /// JSON parameter map, or {command, params, output_dir, seed}.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Directory for emitted files [default: out].
    #[arg(long)]
    output_dir: Option<PathBuf>,
    /// Seed for stochastic choices such as the collapsed-coin draw [default: 0].
    #[arg(long)]
    seed: Option<u64>,
    /// Parameter overrides: --key value ...
    #[arg(trailing_var_arg = true, allow_hyphen_values = true, value_name = "OVERRIDES")]
    overrides: Vec<String>,
}

fn init_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var(THREADS_VAR) else { return Ok(()) };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n >= 1)
        .ok_or_else(|| CliError::Validation(format!("{THREADS_VAR} must be a positive integer, got `{raw}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Numerical(format!("thread pool: {e}")))
}

fn run(cli: Cli) -> Result<String, CliError> {
    init_threads()?;
    let universal = Universal { config: cli.config, output_dir: cli.output_dir, seed: cli.seed };
    let cfg = config::resolve(cli.command, universal, &cli.overrides)?;
    let result = commands::execute(&cfg)?;
    output::write_all(&cfg.output_dir, &result.artifacts)?;
    Ok(format!("{} [{}]", result.summary, cfg.output_dir.display()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("zenograv: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
