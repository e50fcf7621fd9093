use dynamics::DynamicsError;
use thiserror::Error;

/// Errors raised while assembling or running ensemble experiments.
#[derive(Debug, Error)]
pub enum AsymptoticsError {
    /// The ensemble parameters violate their documented ranges.
    #[error("invalid ensemble specification: {0}")]
    InvalidSpec(String),

    /// A Monte Carlo sample aborted (typically a blow-up), reported with its
    /// sample index so the offending path can be replayed.
    #[error("sample {index} failed: {source}")]
    Sample {
        index: usize,
        #[source]
        source: DynamicsError,
    },

    /// A shared (non-sampled) solve failed, e.g. the skeleton reference.
    #[error("reference solve failed: {0}")]
    Reference(#[from] DynamicsError),

    /// The scaling fit refused its input table.
    #[error("scaling fit rejected: {0}")]
    FitRejected(String),

    /// A control was outside the admissible level set it must belong to.
    #[error("control outside the admissible level set: 2E(h) = {two_energy:.6} > N = {level:.6}")]
    ControlOutsideLevel { two_energy: f64, level: f64 },
}
