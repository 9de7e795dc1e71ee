//! `saddle`: verification suites, spectra, the Biot benchmark and Matrix
//! Market export.

mod args;
mod commands;
mod config;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("size guard: {0}")]
    Guard(String),
    #[error("io: {0}")]
    Io(String),
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Failed(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Guard(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

/// Outcome of a command that ran to completion.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    /// Some asserted check failed; details already went to stderr.
    CheckFailed,
}

fn run(argv: Vec<String>) -> Result<Outcome, CliError> {
    let argv = config::merge_args(argv)?;
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    match cli.command {
        Command::Verify(a) => commands::verify(&a),
        Command::Spectrum(a) => commands::spectrum(&a),
        Command::Biot(a) => commands::biot(&a),
        Command::Export(a) => commands::export(&a),
    }
}

fn main() -> ExitCode {
    match run(std::env::args().collect()) {
        Ok(Outcome::Pass) => ExitCode::SUCCESS,
        Ok(Outcome::CheckFailed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("saddle: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
