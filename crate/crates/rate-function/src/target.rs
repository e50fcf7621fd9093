use crate::error::RateError;
use dynamics::TimeGrid;
use spectral_core::{Scalar, SpectralField, SpectralGrid};

/// What the variational problem aims at: a terminal state, or a whole
/// reference trajectory sampled at the time-grid nodes.
#[derive(Debug, Clone)]
pub enum TargetSpec<T: Scalar> {
    /// Hit `x_T` at the final time.
    Terminal(SpectralField<T>),
    /// Track one field per node (node 0 included; since trajectories start
    /// at zero, its entry only shifts the misfit by a constant).
    Trajectory(Vec<SpectralField<T>>),
}

impl<T: Scalar> TargetSpec<T> {
    pub fn mode(&self) -> &'static str {
        match self {
            TargetSpec::Terminal(_) => "terminal",
            TargetSpec::Trajectory(_) => "trajectory",
        }
    }

    /// Check lattice sizes, node count, and the divergence-free Hermitian
    /// field invariants.
    pub fn validate(&self, grid: &SpectralGrid<T>, tg: &TimeGrid<T>) -> Result<(), RateError> {
        let check_field = |f: &SpectralField<T>, what: &str| -> Result<(), RateError> {
            if f.k_max() != grid.k_max() {
                return Err(RateError::InvalidSpec(format!(
                    "{what} lives on a K = {} lattice, expected K = {}",
                    f.k_max(),
                    grid.k_max()
                )));
            }
            f.validate()
                .map_err(|e| RateError::InvalidSpec(format!("{what} is not a valid state: {e}")))
        };
        match self {
            TargetSpec::Terminal(x) => check_field(x, "terminal target"),
            TargetSpec::Trajectory(gs) => {
                if gs.len() != tg.n_nodes() {
                    return Err(RateError::InvalidSpec(format!(
                        "trajectory target has {} nodes, the time grid has {}",
                        gs.len(),
                        tg.n_nodes()
                    )));
                }
                for (n, g) in gs.iter().enumerate() {
                    check_field(g, &format!("trajectory target node {n}"))?;
                }
                Ok(())
            }
        }
    }
}

/// Trapezoidal node weights `dt·(1/2, 1, …, 1, 1/2)` used by trajectory
/// misfits; chosen over one-sided rules so the quadratic form (and with it
/// the adjoint sweep) is symmetric in time.
pub fn trapezoid_weights<T: Scalar>(tg: &TimeGrid<T>) -> Vec<T> {
    let dt = tg.dt();
    let half = dt / (T::one() + T::one());
    let mut w = vec![dt; tg.n_nodes()];
    w[0] = half;
    let last = tg.n_steps();
    w[last] = half;
    w
}
