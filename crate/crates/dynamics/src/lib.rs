//! Time integration for the coupled family of second grade fluid equations:
//! the stochastic primal equation, its deterministic limit, the Gaussian
//! fluctuation (central-limit) linearization, the moderate-deviation
//! rescalings with and without controls, and the deterministic controlled
//! limit (skeleton).
//!
//! The design splits into three layers:
//!
//! * **Inputs** — [`TimeGrid`] (uniform partitions of `[0, T]`),
//!   [`NoisePath`] (counter-derived, bitwise-reproducible Brownian
//!   increments) and [`Control`] (piecewise-constant control densities with
//!   their energy).  A noise path is always an explicit argument, never
//!   hidden generator state, so two equations can be coupled pathwise by
//!   passing the same object.
//! * **Steppers** — one-step exponential integrators
//!   ([`DeterministicStepper`], [`SpdeStepper`], [`CltStepper`],
//!   [`DeviationStepper`], [`SkeletonStepper`]) that factor the Stokes
//!   semigroup exactly and expose `state`/`step` for lockstep coupling.
//! * **Drivers** — `solve_*` functions returning a [`Trajectory`] with
//!   `V`/`W`-norm histories at every node and full fields per
//!   [`RecordPolicy`].  Linearized equations consume their base trajectory
//!   through a [`FrozenBase`], which caches the spectral and collocation
//!   representations of the base state once per node.
//!
//! The stochastic steppers share one algebraic normal form: the explicit
//! increment (drift, control, noise) is assembled first and the whole sum is
//! then pushed through the semigroup.  Consequently the centered, rescaled
//! deviation of two primal solves on the same path satisfies exactly the
//! discrete recursion of the direct deviation solver — the continuum
//! rescaling identities survive discretization at roundoff accuracy, which
//! the integration tests assert.

mod control;
mod error;
mod frozen;
mod noise;
mod solvers;
mod steppers;
mod time;
mod trajectory;

pub use control::Control;
pub use error::DynamicsError;
pub use frozen::FrozenBase;
pub use noise::{brownian_path, sample_seed, NoisePath};
pub use solvers::{
    solve_controlled_mdp, solve_deterministic, solve_linearized_clt, solve_skeleton, solve_spde,
    solve_z_eps,
};
pub use steppers::{
    semigroup_factor, CltStepper, DeterministicStepper, DeviationStepper, SkeletonStepper,
    SpdeStepper, Stepper,
};
pub use time::TimeGrid;
pub use trajectory::{EquationKind, RecordPolicy, Trajectory, TrajectoryMeta};

/// Crate version, recorded in output manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
