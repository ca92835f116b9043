//! The `kpz-lab` command line: argument model, config merging, commands and the self-test.

pub mod args;
pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod selftest;

use std::ffi::OsString;

use clap::Parser;

use args::{Cli, Command};
use error::CliError;

/// Reads `KPZ_LAB_THREADS` (0 or unset = automatic) and sizes the worker pool.
pub fn configure_threads_from_env() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("KPZ_LAB_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| error::validation(format!("KPZ_LAB_THREADS must be a nonnegative integer, got '{raw}'")))?;
    if n > 0 {
        kpz_lab::par::configure_threads(n);
    }
    Ok(())
}

/// Parses and runs one invocation, writing results to stdout or the requested file.
pub fn run(args: Vec<OsString>) -> Result<(), CliError> {
    let args = config::merge_config(args)?;
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) if e.use_stderr() => return Err(error::validation(e.to_string().trim_end().replace('\n', " "))),
        Err(e) => {
            print!("{e}");
            return Ok(());
        }
    };
    configure_threads_from_env()?;
    match &cli.command {
        Command::Dist(a) => output::emit(a.output.as_deref(), &commands::dist(a)?),
        Command::Simulate(a) => output::emit(a.output.as_deref(), &commands::simulate(a)?),
        Command::Compare(a) => output::emit(None, &commands::compare(a)?),
        Command::Selftest(a) => {
            let opts = selftest::SelftestOptions { perturb_lambda: a.perturb_lambda };
            let checks = selftest::run(&opts, |c| println!("{}", c.line()));
            let failed = checks.iter().filter(|c| !c.passed).count();
            println!("{} of {} checks passed", checks.len() - failed, checks.len());
            if failed > 0 {
                Err(CliError::SelftestFailed(failed))
            } else {
                Ok(())
            }
        }
    }
}
