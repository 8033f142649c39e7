//! Command implementations behind the `kbest` binary.
//!
//! Every command returns its CSV text plus an [`Outcome`]; the binary only
//! writes the text and maps the outcome to an exit status.

pub mod commands;
pub mod config;
pub mod csv;

pub use commands::{cmd_asymptotic, cmd_compare, cmd_convergence, cmd_figure, cmd_simulate, Outcome, Report};
pub use config::{RunConfig, Sweep, SweepVar};

/// Failures that stop a command before it produces a report.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(kbest_core::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// Process exit status for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Numerical(_) => 3,
            CliError::Config(_) | CliError::Io(_) => 2,
        }
    }
}

impl From<kbest_core::Error> for CliError {
    fn from(e: kbest_core::Error) -> Self {
        use kbest_core::Error as E;
        match e {
            E::Accuracy { .. } | E::NonFinite { .. } => CliError::Numerical(e),
            other => CliError::Config(other.to_string()),
        }
    }
}
