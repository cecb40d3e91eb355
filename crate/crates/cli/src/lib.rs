//! File formats and command dispatch for the `semigroup` binary.
//!
//! Exit codes: 0 when every check passes (or the inequality HOLDS), 1 when
//! a check fails or a violation is found, 2 for bad input, 3 for numerical
//! failures.

pub mod args;
mod commands;
pub mod error;
pub mod formats;

use std::ffi::OsString;
use std::io::Write;

use clap::Parser;

pub use commands::{Outcome, Report, RunConfig};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

/// Parses `args`, runs the command, prints the report to `out` and
/// diagnostics to `err`, and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match args::Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_PASS };
            let rendered = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{rendered}");
            } else {
                let _ = write!(out, "{rendered}");
            }
            return code;
        }
    };
    match commands::dispatch(&cli, err) {
        Ok(outcome) => {
            let _ = out.write_all(outcome.json.as_bytes());
            if outcome.passed {
                EXIT_PASS
            } else {
                EXIT_FAIL
            }
        }
        Err(e) => {
            let _ = writeln!(err, "{e}");
            e.exit_code()
        }
    }
}
