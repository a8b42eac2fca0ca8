//! `ptf-fool` command-line driver.
//!
//! Exit codes: 0 success, 1 a checked property failed, 2 invalid input.
//! The one-line summary goes to stdout when `--out` is given, to stderr
//! otherwise.

mod args;
mod commands;

use std::ffi::OsString;
use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use crate::args::Cli;

#[derive(Debug, thiserror::Error)]
pub enum Failure {
    #[error("{0}")]
    Invalid(String),
    #[error("check failed: {0}")]
    Assertion(String),
}

impl From<ptf_fool::Error> for Failure {
    fn from(e: ptf_fool::Error) -> Self {
        Failure::Invalid(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Invalid(e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Invalid(e.to_string())
    }
}

/// Parses `argv`, runs the subcommand and returns the exit code.
pub fn run<I, T>(argv: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code() as u8;
        }
    };
    let common = cli.command.common();
    let threads = common.threads.unwrap_or(0);
    // Keep stdout clean when it carries the output itself.
    let to_stdout = common.out.is_some();
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    match pool.install(|| commands::dispatch(&cli.command)) {
        Ok(summary) => {
            if to_stdout {
                let _ = writeln!(std::io::stdout(), "{summary}");
            } else {
                let _ = writeln!(std::io::stderr(), "{summary}");
            }
            0
        }
        Err(Failure::Invalid(msg)) => {
            eprintln!("error: {msg}");
            2
        }
        Err(f @ Failure::Assertion(_)) => {
            eprintln!("{f}");
            1
        }
    }
}

fn main() -> ExitCode {
    ExitCode::from(run(std::env::args_os()))
}
