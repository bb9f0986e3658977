//! Command-line front end: TOML configs in, CSV or JSON records out.

use std::path::PathBuf;

use clap::Parser;

pub mod config;
pub mod output;
pub mod run;

pub use config::{parse_config, read_config, ConfigFile};
pub use output::{Document, Field};
pub use run::{run, Format, Mode, RunConfig};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid input: {0}")]
    Validation(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("case transition: {0}")]
    CaseTransition(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Validation(_) => 3,
            CliError::Numerical(_) | CliError::Io(_) => 4,
            CliError::CaseTransition(_) => 5,
        }
    }
}

impl From<wzphase::Error> for CliError {
    fn from(e: wzphase::Error) -> Self {
        use wzphase::Error as E;
        let msg = e.to_string();
        match e {
            E::CaseTransition { .. } => CliError::CaseTransition(msg),
            E::NoConvergence { .. } | E::AlignmentFailed(_) | E::StepTooLarge(_) => {
                CliError::Numerical(msg)
            }
            _ => CliError::Validation(msg),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "wzphase",
    version,
    about = "Non-Abelian geometric phases of three-level Hamiltonians"
)]
pub struct Cli {
    pub mode: Mode,
    #[arg(long)]
    pub config: PathBuf,
    /// Degeneracy tolerance, relative to the largest matrix entry.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    /// Write here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Runs a parsed command line and returns the rendered document.
pub fn execute(cli: &Cli) -> Result<String, CliError> {
    let cfg = read_config(&cli.config)?;
    let rc = RunConfig::new(cli.mode, cfg, cli.tol, cli.steps)?;
    let doc = run(&rc)?;
    Ok(match cli.format {
        Format::Csv => doc.to_csv(),
        Format::Json => doc.to_json(),
    })
}
