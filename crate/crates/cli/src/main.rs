//! `shiftdyn`: command-line experiments for weighted shift dynamics.

mod args;
mod commands;
mod output;

use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;

use args::Cli;
use output::{CliError, Emitter};

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("SHIFTDYN_LOG_LEVEL", "error")).init();
    let cli = Cli::parse();
    let started = Instant::now();
    let result = commands::run(&cli).and_then(|out| {
        Emitter::new(&cli).emit(&out, started.elapsed().as_secs_f64())
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("shiftdyn: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}
