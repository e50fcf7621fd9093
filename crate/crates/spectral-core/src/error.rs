use thiserror::Error;

#[derive(Debug, Error)]
pub enum SpectralError {
    #[error("k_max must be at least 2, got {0}")]
    KMaxTooSmall(u32),
    #[error("{0} must be positive")]
    NonPositive(&'static str),
    #[error("collocation side {got} is below the minimum 2K+1 = {min}")]
    CollocationTooSmall { got: usize, min: usize },
    #[error("wavevector ({0}, {1}) is off the lattice")]
    OffLattice(i32, i32),
    #[error("spectrum slope must exceed 1, got {0}")]
    SlopeTooShallow(f64),
    #[error("field invariant violated: {0}")]
    Invariant(String),
    #[error("snapshot format: {0}")]
    Snapshot(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
