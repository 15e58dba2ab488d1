//! Experiment drivers behind the `monogamy` binary.
//!
//! Each subcommand samples states, builds records, runs an audit and writes
//! CSV or JSON. Output depends only on the flags, so two runs with the same
//! seed and configuration produce identical bytes.

pub mod args;
mod commands;

use std::io::Write;

use thiserror::Error;

pub use args::{BoundConstant, Cli, Command, CurveId, Format, RunConfig};
pub use commands::execute;

/// Version tag carried by every JSON document.
pub const SCHEMA_VERSION: u32 = 1;

/// Header of every record CSV.
pub const RECORD_HEADER: [&str; 7] = [
    "index", "seed", "measure", "e_abc", "e_ab", "e_ac", "residual",
];

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] monogamy::Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

/// What a subcommand produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub bytes: Vec<u8>,
    /// An audit that is expected to come back clean found something.
    pub findings: Option<String>,
}

/// Exit status: 0 clean, 1 audit findings, 2 usage or I/O error.
pub fn run(cli: &Cli) -> i32 {
    let result = execute(cli).and_then(|outcome| {
        match &cli.run.out {
            Some(path) => std::fs::write(path, &outcome.bytes)?,
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(&outcome.bytes)?;
                out.flush()?;
            }
        }
        Ok(outcome.findings)
    });
    match result {
        Ok(None) => 0,
        Ok(Some(msg)) => {
            eprintln!("audit: {msg}");
            1
        }
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}
