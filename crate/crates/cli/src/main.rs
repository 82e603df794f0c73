//! `vardecomp synth | decompose | eval`
//!
//! Exit codes: 0 success, 1 invalid arguments or parameters, 2 I/O or file
//! format errors, 3 the decomposition hit `n_step` before converging.

mod args;
mod commands;
mod report;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, Command};

pub const EXIT_VALIDATION: u8 = 1;
pub const EXIT_IO: u8 = 2;
pub const EXIT_NOT_CONVERGED: u8 = 3;

/// Why a command stopped short of success.
#[derive(Debug)]
pub enum Failure {
    Validation(String),
    Io(String),
}

impl From<vardecomp::Error> for Failure {
    fn from(e: vardecomp::Error) -> Self {
        match e {
            vardecomp::Error::Io(_) | vardecomp::Error::Format(_) => Failure::Io(e.to_string()),
            _ => Failure::Validation(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

/// Completed run; `converged == false` maps to exit code 3.
pub struct Outcome {
    pub converged: bool,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .target(env_logger::Target::Stderr)
        .init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_VALIDATION),
            };
        }
    };
    let result = match &cli.command {
        Command::Synth(a) => commands::synth(a),
        Command::Decompose(a) => commands::decompose(a),
        Command::Eval(a) => commands::eval(a),
    };
    match result {
        Ok(Outcome { converged: true }) => ExitCode::SUCCESS,
        Ok(Outcome { converged: false }) => {
            log::warn!("stopped at n_step without meeting epsilon");
            ExitCode::from(EXIT_NOT_CONVERGED)
        }
        Err(Failure::Validation(msg)) => {
            log::error!("{msg}");
            ExitCode::from(EXIT_VALIDATION)
        }
        Err(Failure::Io(msg)) => {
            log::error!("{msg}");
            ExitCode::from(EXIT_IO)
        }
    }
}
