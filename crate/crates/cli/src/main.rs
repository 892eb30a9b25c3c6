//! `gcascade`: synthesize, compose, verify and simulate cascades of open
//! oscillators preparing pure Gaussian states.
//!
//! Exit codes: 0 success, 1 residual above threshold, 2 parse or parameter
//! error, 3 invalid state, 4 dimension mismatch, 5 unstable drift.

mod commands;
mod config;

use std::process::ExitCode;

use clap::Parser;

use config::{Cli, Command};

fn run(cli: Cli) -> Result<u8, config::CliError> {
    match cli.command {
        Command::Synthesize { io } => commands::synthesize(&io),
        Command::Compose { io } => commands::compose(&io),
        Command::Verify { io, target } => commands::verify(&io, target.as_deref()),
        Command::Simulate { io, t_end, dt, v0, summary } => {
            commands::simulate(&io, t_end, dt, &v0, summary.as_deref())
        }
        Command::Example { name, alpha, io } => commands::example(name, alpha, &io),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.code)
        }
    }
}
