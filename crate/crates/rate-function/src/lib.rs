//! The skeleton solution map Γ⁰ and the variational rate function
//!
//! ```text
//! I(g) = inf { ½ ∫₀ᵀ |hdot(s)|² ds  :  Γ⁰(∫ hdot) = g },   inf ∅ = +∞,
//! ```
//!
//! computed as a discrete linear-quadratic minimum-energy control problem.
//!
//! Γ⁰ maps a square-integrable control `h` to the solution of the controlled
//! limit equation linearized about a frozen base trajectory; because that
//! equation starts from zero, the discrete solution map `L` is linear in the
//! control.  The rate of a terminal state is then the squared minimum-norm
//! preimage: [`SkeletonMap::min_norm_control`] solves the normal equations
//! `L Lᵀ y = x_T` by matrix-free conjugate gradients, where the adjoint `Lᵀ`
//! is the *exact* transpose of the one-step recursion (discretize, then
//! optimize).  Exactness is testable: `⟨Lh, y⟩_V = ⟨h, Lᵀy⟩` to roundoff,
//! misfit gradients match directional finite differences, and the recovered
//! rate obeys the quadratic scaling `I(c·x) = c² I(x)`.
//!
//! Terminal-state targets are the primary mode.  Full-trajectory targets are
//! supported for misfit gradients (node residuals stacked with trapezoidal
//! weights), but which trajectories are exactly reachable is not
//! characterized, so the minimum-energy solver restricts itself to terminal
//! mode.
//!
//! Unreachable targets are a legitimate outcome, not an error: targets with
//! a component outside the range of `L` (for instance when some channels
//! carry zero gain) make the feasible set empty, CG stagnates, and the
//! result reports `reachable = false` with `value = +∞`.

mod error;
mod map;
mod solve;
mod target;

pub use error::RateError;
pub use map::{control_inner, GradientReport, SkeletonMap};
pub use solve::{RateResult, DEFAULT_MAX_ITER};
pub use target::{trapezoid_weights, TargetSpec};

use coefficients::CoefficientSet;
use dynamics::{solve_skeleton, Control, FrozenBase, RecordPolicy, TimeGrid, Trajectory};
use spectral_core::{Scalar, SpectralGrid};

/// The skeleton map Γ⁰: the trajectory of the controlled limit equation
/// driven by `h` about the frozen base, recorded at every node.  Linear in
/// `h`, with Γ⁰(0) = 0.
pub fn gamma0<T: Scalar>(
    grid: &SpectralGrid<T>,
    coeffs: &CoefficientSet<T>,
    tg: &TimeGrid<T>,
    base: &FrozenBase<T>,
    h: &Control<T>,
) -> Result<Trajectory<T>, RateError> {
    Ok(solve_skeleton(
        grid,
        coeffs,
        tg,
        base,
        h,
        RecordPolicy::EveryNode,
    )?)
}

/// Crate version, recorded in output manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
