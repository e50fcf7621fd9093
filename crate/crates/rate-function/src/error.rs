use dynamics::DynamicsError;
use thiserror::Error;

/// Failure modes of the rate-function machinery.
#[derive(Debug, Error)]
pub enum RateError {
    /// A forward or adjoint sweep failed inside the dynamics layer.
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),

    /// An input violated a precondition of the variational solver.
    #[error("invalid rate problem: {0}")]
    InvalidSpec(String),
}
