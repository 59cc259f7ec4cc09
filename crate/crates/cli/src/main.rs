//! `nbpk`: sample random partitions of the simplex, evaluate densities, run
//! the verification suites and emit rank-frequency data.

mod args;
mod commands;
mod output;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

/// Failure modes, mapped onto the process exit status.
#[derive(Debug)]
pub enum CliError {
    /// Invalid parameters or combinations (exit 2).
    Usage(String),
    /// Runtime failure, including failed verification (exit 1).
    Failed(String),
}

impl From<nbpk::Error> for CliError {
    fn from(e: nbpk::Error) -> Self {
        match e {
            nbpk::Error::Domain(_) | nbpk::Error::Unsupported(_) => CliError::Usage(e.to_string()),
            other => CliError::Failed(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Failed(format!("i/o error: {e}"))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Failed(format!("json error: {e}"))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Sample(a) => commands::sample(&a),
        Command::Density(a) => commands::density(&a),
        Command::Verify(a) => commands::verify(&a),
        Command::Zipf(a) => commands::zipf(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(CliError::Failed(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
    }
}
