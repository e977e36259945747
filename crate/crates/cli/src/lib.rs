//! Library side of the `betagamma` command-line tool.
//!
//! [`run`] executes one [`RunConfig`], producing a CSV table, a short
//! human-readable summary and the process exit status: 0 on success, 1 for
//! domain or configuration errors, 2 when a solver fails to converge. A
//! certificate whose hypotheses fail is still a successful run.

use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;

use thiserror::Error;

pub mod args;
mod commands;
pub mod params;
pub mod table;

pub use commands::{emit_convergence_report, parse_generator};
use table::{svg_chart, PlotSpec, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Eval,
    Ray,
    Certify,
    Betatype,
    Scan,
    Converge,
}

impl Command {
    pub fn as_str(&self) -> &'static str {
        match self {
            Command::Eval => "eval",
            Command::Ray => "ray",
            Command::Certify => "certify",
            Command::Betatype => "betatype",
            Command::Scan => "scan",
            Command::Converge => "converge",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub parameters: BTreeMap<String, String>,
    pub output_path: Option<PathBuf>,
    pub plot_path: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        Self {
            command,
            parameters: BTreeMap::new(),
            output_path: None,
            plot_path: None,
        }
    }

    pub fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.parameters.insert(key.to_string(), value.to_string());
        self
    }
}

#[derive(Debug, Error)]
#[error("{message}")]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        Self {
            code: 1,
            message: message.into(),
        }
    }
}

impl From<betagamma::Error> for CliError {
    fn from(e: betagamma::Error) -> Self {
        use betagamma::Error as E;
        let code = match e {
            E::Convergence(_) | E::Inconsistent(_) => 2,
            E::Domain(_) | E::Hypothesis(_) | E::Overflow(_) | E::Config(_) => 1,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

/// Everything a command produces before it is written anywhere.
pub struct Artifacts {
    pub table: Table,
    pub summary: Vec<String>,
    pub plot: Option<PlotSpec>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub exit_code: i32,
    /// CSV text, also written to `output_path` when set. Empty on failure.
    pub csv: String,
    pub summary: Vec<String>,
}

/// Runs one command and writes the configured files.
pub fn run(cfg: &RunConfig) -> RunOutcome {
    match run_inner(cfg) {
        Ok(outcome) => outcome,
        Err(e) => RunOutcome {
            exit_code: e.code,
            csv: String::new(),
            summary: vec![format!("error: {}", e.message)],
        },
    }
}

fn run_inner(cfg: &RunConfig) -> Result<RunOutcome, CliError> {
    let mut params = params::Params::new(&cfg.parameters);
    let artifacts = commands::dispatch(cfg.command, &mut params)?;
    let used = params.finish()?;
    let csv = artifacts.table.to_csv(cfg.command.as_str(), &used);
    if let Some(path) = &cfg.output_path {
        fs::write(path, &csv)
            .map_err(|e| CliError::config(format!("cannot write {}: {e}", path.display())))?;
    }
    if let (Some(path), Some(spec)) = (&cfg.plot_path, &artifacts.plot) {
        fs::write(path, svg_chart(&artifacts.table, spec))
            .map_err(|e| CliError::config(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(RunOutcome {
        exit_code: 0,
        csv,
        summary: artifacts.summary,
    })
}
