//! Whole-trajectory drivers wrapping the one-step integrators.
//!
//! Each `solve_*` function constructs the matching stepper, integrates the
//! full time grid, and records norms at every node plus fields per the
//! recording policy.  Ensembles that need pathwise couplings (differences of
//! two equations on the same noise) drive the steppers directly instead.

use crate::control::Control;
use crate::error::DynamicsError;
use crate::frozen::FrozenBase;
use crate::noise::NoisePath;
use crate::steppers::{
    CltStepper, DeterministicStepper, DeviationStepper, SkeletonStepper, SpdeStepper, Stepper,
};
use crate::time::TimeGrid;
use crate::trajectory::{EquationKind, RecordPolicy, Trajectory, TrajectoryMeta};
use coefficients::CoefficientSet;
use spectral_core::{Scalar, SpectralField, SpectralGrid};

fn drive<T: Scalar, S: Stepper<T>>(
    grid: &SpectralGrid<T>,
    tg: &TimeGrid<T>,
    mut stepper: S,
    policy: RecordPolicy,
    meta: TrajectoryMeta<T>,
) -> Result<Trajectory<T>, DynamicsError> {
    let n_steps = tg.n_steps();
    let mut traj = Trajectory::new(n_steps, meta);
    traj.record(grid, 0, n_steps, T::zero(), stepper.state(), policy);
    for n in 0..n_steps {
        stepper.step()?;
        traj.record(grid, n + 1, n_steps, tg.node_time(n + 1), stepper.state(), policy);
    }
    Ok(traj)
}

/// Integrates the deterministic limit equation with the second-order
/// two-stage exponential scheme.
pub fn solve_deterministic<T: Scalar>(
    grid: &SpectralGrid<T>,
    coeffs: &CoefficientSet<T>,
    tg: &TimeGrid<T>,
    initial: &SpectralField<T>,
    policy: RecordPolicy,
) -> Result<Trajectory<T>, DynamicsError> {
    let stepper = DeterministicStepper::new(grid, coeffs, *tg, initial.clone());
    let meta = TrajectoryMeta {
        equation: EquationKind::Deterministic,
        epsilon: None,
        lambda: None,
        seed: None,
    };
    drive(grid, tg, stepper, policy, meta)
}

/// Integrates the primal stochastic equation at intensity `epsilon >= 0`
/// with the exponential Euler–Maruyama scheme on the given noise path.
pub fn solve_spde<T: Scalar>(
    grid: &SpectralGrid<T>,
    coeffs: &CoefficientSet<T>,
    tg: &TimeGrid<T>,
    initial: &SpectralField<T>,
    epsilon: T,
    noise: &NoisePath<T>,
    policy: RecordPolicy,
) -> Result<Trajectory<T>, DynamicsError> {
    let stepper = SpdeStepper::new(grid, coeffs, *tg, initial.clone(), epsilon, noise)?;
    let meta = TrajectoryMeta {
        equation: EquationKind::Primal,
        epsilon: Some(epsilon),
        lambda: None,
        seed: noise.seed(),
    };
    drive(grid, tg, stepper, policy, meta)
}

/// Integrates the Gaussian fluctuation equation along a frozen base,
/// started from zero.
pub fn solve_linearized_clt<T: Scalar>(
    grid: &SpectralGrid<T>,
    coeffs: &CoefficientSet<T>,
    tg: &TimeGrid<T>,
    base: &FrozenBase<T>,
    noise: &NoisePath<T>,
    policy: RecordPolicy,
) -> Result<Trajectory<T>, DynamicsError> {
    let stepper = CltStepper::new(grid, coeffs, *tg, base, noise)?;
    let meta = TrajectoryMeta {
        equation: EquationKind::CltLinearization,
        epsilon: None,
        lambda: None,
        seed: noise.seed(),
    };
    drive(grid, tg, stepper, policy, meta)
}

/// Integrates the centered, rescaled deviation equation at `(epsilon, lambda)`
/// (no control), started from zero.
pub fn solve_z_eps<T: Scalar>(
    grid: &SpectralGrid<T>,
    coeffs: &CoefficientSet<T>,
    tg: &TimeGrid<T>,
    base: &FrozenBase<T>,
    epsilon: T,
    lambda: T,
    noise: &NoisePath<T>,
    policy: RecordPolicy,
) -> Result<Trajectory<T>, DynamicsError> {
    let stepper = DeviationStepper::new(grid, coeffs, *tg, base, epsilon, lambda, None, noise)?;
    let meta = TrajectoryMeta {
        equation: EquationKind::ModerateDeviation,
        epsilon: Some(epsilon),
        lambda: Some(lambda),
        seed: noise.seed(),
    };
    drive(grid, tg, stepper, policy, meta)
}

/// Integrates the controlled moderate-deviation equation, started from zero.
pub fn solve_controlled_mdp<T: Scalar>(
    grid: &SpectralGrid<T>,
    coeffs: &CoefficientSet<T>,
    tg: &TimeGrid<T>,
    base: &FrozenBase<T>,
    epsilon: T,
    lambda: T,
    control: &Control<T>,
    noise: &NoisePath<T>,
    policy: RecordPolicy,
) -> Result<Trajectory<T>, DynamicsError> {
    let stepper =
        DeviationStepper::new(grid, coeffs, *tg, base, epsilon, lambda, Some(control), noise)?;
    let meta = TrajectoryMeta {
        equation: EquationKind::ControlledModerate,
        epsilon: Some(epsilon),
        lambda: Some(lambda),
        seed: noise.seed(),
    };
    drive(grid, tg, stepper, policy, meta)
}

/// Integrates the deterministic controlled limit (skeleton) equation,
/// started from zero.
pub fn solve_skeleton<T: Scalar>(
    grid: &SpectralGrid<T>,
    coeffs: &CoefficientSet<T>,
    tg: &TimeGrid<T>,
    base: &FrozenBase<T>,
    control: &Control<T>,
    policy: RecordPolicy,
) -> Result<Trajectory<T>, DynamicsError> {
    let stepper = SkeletonStepper::new(grid, coeffs, *tg, base, control)?;
    let meta = TrajectoryMeta {
        equation: EquationKind::Skeleton,
        epsilon: None,
        lambda: None,
        seed: None,
    };
    drive(grid, tg, stepper, policy, meta)
}
