//! Command-line front end for `eqtrap`: parameter sweeps over the built-in
//! models, Monte-Carlo bound checks and a validation run, written as CSV or
//! JSON with a fixed column order.

pub mod args;
pub mod commands;
pub mod table;
pub mod validate;

use std::fs::File;
use std::io::{self, BufWriter, Write};

use thiserror::Error;

pub use args::{Cli, Command};
pub use table::{Table, Value};

pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_VALIDATION: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("validation failed: {}", .0.join(", "))]
    Validation(Vec<String>),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl From<eqtrap::Error> for CliError {
    fn from(e: eqtrap::Error) -> Self {
        CliError::Config(e.to_string())
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Validation(_) => EXIT_VALIDATION,
            _ => 1,
        }
    }
}

fn emit(table: &Table, output: &args::OutputArgs) -> Result<(), CliError> {
    let sink: Box<dyn Write> = match &output.out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    match output.format {
        args::Format::Csv => table.write_csv(sink),
        args::Format::Json => table.write_json(sink),
    }
}

/// Runs one parsed invocation.
pub fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Figure1(a) => emit(&commands::figure1(a)?, &a.output),
        Command::Figure2(a) => emit(&commands::figure2(a)?, &a.output),
        Command::TwoBand(a) => emit(&commands::two_band(a)?, &a.output),
        Command::RandomBound(a) => emit(&commands::random_bound(a)?, &a.output),
        Command::Validate(a) => {
            let checks = validate::run_all(a);
            let mut failed = Vec::new();
            for check in &checks {
                if check.passed {
                    println!("PASS {}", check.name);
                } else {
                    println!("FAIL {}: {}", check.name, check.detail);
                    failed.push(check.name.to_string());
                }
            }
            if failed.is_empty() {
                Ok(())
            } else {
                Err(CliError::Validation(failed))
            }
        }
    }
}
