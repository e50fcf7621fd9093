use thiserror::Error;

#[derive(Debug, Error)]
pub enum CoefficientError {
    #[error("Lipschitz sampling needs at least 2 samples, got {0}")]
    InsufficientSamples(usize),

    #[error(
        "{map}: sampled Lipschitz ratio {ratio:e} exceeds declared bound {bound:e} \
         (sample pair {first}, {second})"
    )]
    LipschitzViolation { map: String, ratio: f64, bound: f64, first: usize, second: usize },

    #[error("derivative check needs a direction with positive V-norm")]
    ZeroDirection,

    #[error("noise channel weights: expected {expected}, got {got}")]
    ChannelMismatch { expected: usize, got: usize },
}
