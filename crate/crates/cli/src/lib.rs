//! Command-line front end: compute best approximants, estimate frequencies,
//! run AAA-Lawson cross-checks, reproduce tables and evaluate stored results.
//!
//! Exit codes: 0 success, 1 runtime or domain error, 2 not converged,
//! 64 usage error.

pub mod args;
pub mod commands;
pub mod document;
pub mod error;
pub mod sweep;

use std::ffi::OsString;
use std::io::Write;

use clap::Parser;

use crate::args::{Cli, Command};
use crate::error::{EXIT_OK, EXIT_USAGE};

/// Parses `args` (program name first) and runs the selected command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                EXIT_USAGE
            } else {
                let _ = write!(out, "{text}");
                EXIT_OK
            };
        }
    };
    let result = match &cli.command {
        Command::Best(a) => commands::best(a, out),
        Command::EstimateOmega(a) => commands::estimate_omega(a, out),
        Command::Aaa(a) => commands::aaa_command(a, out),
        Command::Sweep(a) => commands::sweep_command(a, out),
        Command::Eval(a) => commands::eval(a, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
