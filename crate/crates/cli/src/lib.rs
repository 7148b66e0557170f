//! Batch runner for the fidelity estimators: configuration, execution and output files.

pub mod config;
pub mod io;
pub mod run;

use thiserror::Error;

pub use config::{EstimatorName, OutputFormat, RunConfig};
pub use run::{run, RunReport};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("numerical failure: {0}")]
    Numerical(loschmidt_core::Error),
}

impl CliError {
    /// 2 for configuration problems, 3 for numerical aborts, 1 for i/o.
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Config(_) => 2,
            Self::Numerical(_) => 3,
            Self::Io(_) => 1,
        }
    }
}

impl From<loschmidt_core::Error> for CliError {
    fn from(e: loschmidt_core::Error) -> Self {
        use loschmidt_core::Error as E;
        match e {
            E::Precondition(_)
            | E::InvalidParameter(_)
            | E::UnknownScenario(_)
            | E::DimensionMismatch { .. }
            | E::UnsupportedDegree(_)
            | E::UnsupportedOrder(_) => Self::Config(e.to_string()),
            other => Self::Numerical(other),
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        if e.is_io_error() {
            match e.into_kind() {
                csv::ErrorKind::Io(io) => Self::Io(io),
                _ => unreachable!(),
            }
        } else {
            Self::Config(e.to_string())
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        if e.is_io() {
            Self::Io(e.into())
        } else {
            Self::Config(e.to_string())
        }
    }
}
