//! Command implementations behind the `phaserk` binary.
//!
//! Four subcommands: `analyze` certifies a tableau file, `simulate` runs a
//! phase-field trajectory with energy tracking, `converge` fits a
//! self-convergence order against a fine-step reference, and `construct`
//! builds a third-order pair from family parameters. Every command writes
//! complete files only (temp-then-rename) and is deterministic for fixed
//! flags and seed.

pub mod args;
pub mod commands;
pub mod error;
pub mod init;
mod io_util;

pub use args::{Cli, Command};
pub use error::CliError;

use clap::Parser;

/// Parses `argv` and runs the selected command, returning the process exit
/// code.
pub fn run_cli<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            // clap exits with 2 on usage errors and 0 on --help/--version.
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let outcome = match cli.command {
        Command::Analyze(a) => commands::analyze::run(&a).map(|o| o.exit_code),
        Command::Simulate(a) => commands::simulate::run(&a).map(|o| o.exit_code),
        Command::Converge(a) => commands::converge::run(&a).map(|o| o.exit_code),
        Command::Construct(a) => commands::construct::run(&a).map(|o| o.exit_code),
    };
    match outcome {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            err.exit_code()
        }
    }
}
