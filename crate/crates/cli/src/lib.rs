//! Command-line front end: argument types, command implementations,
//! JSON reports and space-time diagram rendering.

pub mod args;
pub mod commands;
pub mod render;
pub mod report;

use ca_control::Limits;
use thiserror::Error;

pub use args::Cli;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] ca_control::Error),
    #[error("cannot write {0}: {1}")]
    Io(String, std::io::Error),
}

impl CliError {
    /// 2 for invalid input, 3 for an exceeded resource cap.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(ca_control::Error::Resource(_)) => 3,
            _ => 2,
        }
    }
}

/// Runs one command and returns the human-readable summary.
pub fn run(cli: &Cli) -> Result<String, CliError> {
    let limits = Limits::default();
    use args::Command::*;
    Ok(match &cli.command {
        Analyze(a) => commands::analyze(a, &limits)?.1,
        Survey(a) => commands::survey(a, &limits)?.1,
        Steer(a) => commands::steer(a, &limits)?.1,
        Trace(a) => commands::trace(a, &limits)?.1,
        Blocking(a) => commands::blocking(a, &limits)?.1,
    })
}
