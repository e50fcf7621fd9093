use thiserror::Error;

/// Errors produced while assembling time-stepping inputs or during integration.
#[derive(Debug, Error)]
pub enum DynamicsError {
    /// A time grid was requested with a non-positive horizon or zero steps.
    #[error("invalid time grid: {0}")]
    InvalidTimeGrid(&'static str),

    /// The noise path does not match the solver inputs (channel count or
    /// step count disagrees with the coefficient set or time grid).
    #[error("noise path shape mismatch: expected {expected_m} channels x {expected_steps} steps, got {got_m} x {got_steps}")]
    NoiseShape {
        expected_m: usize,
        expected_steps: usize,
        got_m: usize,
        got_steps: usize,
    },

    /// The control does not match the solver inputs.
    #[error("control shape mismatch: expected {expected_m} channels x {expected_steps} steps, got {got_m} x {got_steps}")]
    ControlShape {
        expected_m: usize,
        expected_steps: usize,
        got_m: usize,
        got_steps: usize,
    },

    /// The frozen base trajectory has fewer nodes than the time grid needs.
    #[error("base trajectory has {got} nodes but the time grid needs {needed}")]
    BaseTrajectoryLength { needed: usize, got: usize },

    /// A trajectory was asked to yield full fields it never recorded.
    #[error("trajectory recording is missing the field at node {0}; rerun with RecordPolicy::EveryNode")]
    IncompleteRecording(usize),

    /// The moderate-deviation speed must be strictly positive.
    #[error("moderate-deviation scale lambda must be positive, got {0}")]
    LambdaNotPositive(f64),

    /// The noise intensity must be non-negative (and strictly positive for
    /// the moderate-deviation rescalings, which divide by sqrt(epsilon)).
    #[error("noise intensity epsilon is out of range: {0}")]
    EpsilonOutOfRange(f64),

    /// The solution norm exploded past the safety threshold; the run is
    /// aborted instead of silently returning overflowed fields.
    #[error("{equation} blew up at step {step}: |state|_V = {norm:.3e} exceeds guard {limit:.3e}")]
    BlowUp {
        equation: &'static str,
        step: usize,
        norm: f64,
        limit: f64,
    },
}
