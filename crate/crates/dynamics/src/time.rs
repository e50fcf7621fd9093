use crate::error::DynamicsError;
use spectral_core::{real, Scalar};

/// Uniform partition of `[0, T]` into `n_steps` intervals of width `dt = T / n_steps`.
///
/// Every solver, noise path and control in this crate is indexed against one
/// of these grids: increments and control values are attached to the interval
/// `[t_n, t_{n+1})`, states to the `n_steps + 1` nodes `t_n = n dt`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid<T: Scalar> {
    horizon: T,
    n_steps: usize,
}

impl<T: Scalar> TimeGrid<T> {
    /// Creates the grid, rejecting empty partitions and non-positive horizons.
    pub fn new(horizon: T, n_steps: usize) -> Result<Self, DynamicsError> {
        if n_steps == 0 {
            return Err(DynamicsError::InvalidTimeGrid("n_steps must be at least 1"));
        }
        if !(horizon > T::zero()) || !horizon.is_finite() {
            return Err(DynamicsError::InvalidTimeGrid(
                "horizon must be positive and finite",
            ));
        }
        Ok(Self { horizon, n_steps })
    }

    /// Final time `T`.
    pub fn horizon(&self) -> T {
        self.horizon
    }

    /// Number of integration intervals.
    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    /// Number of state nodes, `n_steps + 1`.
    pub fn n_nodes(&self) -> usize {
        self.n_steps + 1
    }

    /// Step width `dt = T / n_steps`.
    pub fn dt(&self) -> T {
        self.horizon / real::<T>(self.n_steps as f64)
    }

    /// Time of node `n`, i.e. `n * dt`.
    pub fn node_time(&self, n: usize) -> T {
        self.dt() * real::<T>(n as f64)
    }

    /// The grid on the same horizon with twice as many steps.  Used by the
    /// dyadic-refinement convergence studies.
    pub fn refined(&self) -> Self {
        Self {
            horizon: self.horizon,
            n_steps: 2 * self.n_steps,
        }
    }
}
