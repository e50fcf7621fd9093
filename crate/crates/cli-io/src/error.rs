//! Error taxonomy mirroring the process exit-code contract.
//!
//! Every failure a command can hit maps onto exactly one of three exits:
//! `2` for anything wrong with the request itself (flags, config file,
//! referenced paths), `1` for a run that completed but missed its
//! acceptance gate, and `3` for a numerical blow-up inside an integrator.
//! Success is `0`, including outcomes like an unreachable rate target,
//! which is a valid answer rather than an error.

use asymptotics::AsymptoticsError;
use dynamics::DynamicsError;
use rate_function::RateError;
use spectral_core::SpectralError;
use thiserror::Error;

/// Exit status for a run whose gate check failed.
pub const EXIT_GATE_FAILURE: i32 = 1;
/// Exit status for usage or configuration errors.
pub const EXIT_CONFIG_ERROR: i32 = 2;
/// Exit status for numerical blow-up.
pub const EXIT_NUMERICS: i32 = 3;

/// Anything that can stop a command, tagged by how the process should exit.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad usage, malformed or out-of-range configuration, missing paths,
    /// unwritable output directories.
    #[error("config error: {0}")]
    Config(String),
    /// The experiment ran to completion but its acceptance threshold was
    /// missed.
    #[error("gate failure: {0}")]
    Gate(String),
    /// An integrator lost stability or produced non-finite values.
    #[error("numerical failure: {0}")]
    Numerics(String),
}

impl CliError {
    /// The process exit code this error maps to.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG_ERROR,
            CliError::Gate(_) => EXIT_GATE_FAILURE,
            CliError::Numerics(_) => EXIT_NUMERICS,
        }
    }
}

impl From<DynamicsError> for CliError {
    fn from(e: DynamicsError) -> Self {
        match e {
            DynamicsError::BlowUp { .. } => CliError::Numerics(e.to_string()),
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<AsymptoticsError> for CliError {
    fn from(e: AsymptoticsError) -> Self {
        match e {
            AsymptoticsError::Sample { ref source, .. } | AsymptoticsError::Reference(ref source) => {
                match source {
                    DynamicsError::BlowUp { .. } => CliError::Numerics(e.to_string()),
                    _ => CliError::Config(e.to_string()),
                }
            }
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<RateError> for CliError {
    fn from(e: RateError) -> Self {
        match e {
            RateError::Dynamics(inner) => CliError::from(inner),
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<SpectralError> for CliError {
    fn from(e: SpectralError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Config(format!("i/o failure: {e}"))
    }
}
