//! Command-line front end: argument parsing and subcommand dispatch.

mod args;
mod commands;

pub use args::{Cli, Command, EvalCommand};

use clap::Parser;
use std::ffi::OsString;
use std::io::Write;

/// Exit status for malformed invocations.
pub const EXIT_USAGE: i32 = 2;
/// Exit status for failures while running a valid invocation.
pub const EXIT_RUNTIME: i32 = 1;

/// Failure classes that map onto exit statuses.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Runtime(anyhow::Error),
}

macro_rules! runtime_from {
    ($($t:ty),* $(,)?) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Runtime(e.into())
            }
        }
    )*};
}

runtime_from!(
    anyhow::Error,
    std::io::Error,
    serde_json::Error,
    wmx_core::augment::AugmentError,
    wmx_core::ecc::EccError,
    wmx_core::ensemble::EnsembleError,
    wmx_core::harness::HarnessError,
    wmx_core::imgcore::ImageError,
    wmx_core::toymodel::ToyError,
    wmx_core::watermark::WatermarkError,
);

pub(crate) fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Parses `argv` (program name first), runs the command and returns the exit status.
pub fn run_cli<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = if e.use_stderr() {
                write!(err, "{}", e.render())
            } else {
                write!(out, "{}", e.render())
            };
            return e.exit_code();
        }
    };
    match commands::run(cli, out, err) {
        Ok(()) => 0,
        Err(CliError::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
        Err(CliError::Runtime(e)) => {
            let _ = writeln!(err, "error: {e:#}");
            EXIT_RUNTIME
        }
    }
}
