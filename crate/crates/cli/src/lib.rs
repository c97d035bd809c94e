//! Command-line front end: `run(argv)` parses, merges an optional TOML config
//! under the flags, runs the subcommand on a sized worker pool, and returns
//! the process exit code.

mod args;
mod commands;
mod config;
mod output;

pub use args::{Cli, Command, Options};
pub use commands::SIEVE_CAP_ENV;
pub use output::{fmt_real, render, Format, CSV_HEADER};

use clap::Parser;
use std::ffi::OsString;
use thiserror::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_ASSERTION: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] klsum_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_ASSERTION,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_CONFIG
        }
    }
}

fn execute(cli: Cli) -> Result<bool, CliError> {
    let opts = config::merge(cli.opts)?;
    let ctx = commands::Ctx::new(opts)?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(w) = ctx.workers()? {
        pool = pool.num_threads(w);
    }
    let pool = pool
        .build()
        .map_err(|e| CliError::Config(format!("worker pool: {e}")))?;
    pool.install(|| commands::dispatch(cli.command, &ctx))
}
