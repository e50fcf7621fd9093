//! Forcing and noise coefficients for the stochastic second grade fluid
//! model, with the Lipschitz/differentiability structure the well-posedness
//! and deviation arguments require:
//!
//! * `F` vanishes at zero and is V-Lipschitz with constant C₁,
//! * `F′` is the Gateaux derivative of F, bounded in L(V) by C₂,
//! * the channels `G_j` vanish at zero and are jointly Lipschitz with
//!   Hilbert–Schmidt constant C₃ (purely additive noise is therefore
//!   intentionally unsupported).
//!
//! Every declared constant is *checkable*: [`check_lipschitz`] samples
//! difference quotients against the declared bounds and
//! [`derivative_check`] validates F′ by central finite differences. The
//! equations consume the lifted versions F̂ = (I+αA)⁻¹F and Ĝ_j = (I+αA)⁻¹G_j
//! via [`hat_lift`].
//!
//! Built-ins are autonomous; the time argument is threaded through every
//! interface so time-dependent user coefficients plug in without change.

mod checks;
mod error;
mod forcing;
mod noise;
pub mod testing;

pub use checks::{check_lipschitz, check_lipschitz_on, derivative_check, hat_lift, LipschitzReport};
pub use error::CoefficientError;
pub use forcing::{LinearF, SaturatingF};
pub use noise::{DiagonalG, ProjectionG};

use spectral_core::{Scalar, SpectralField, SpectralGrid};
use std::sync::Arc;

/// Deterministic forcing F together with its Gateaux derivative.
pub trait Forcing<T: Scalar>: Send + Sync {
    /// F(u, t).
    fn eval_f(&self, grid: &SpectralGrid<T>, u: &SpectralField<T>, t: T) -> SpectralField<T>;

    /// Directional derivative F′(u, t; dir).
    fn eval_f_prime(
        &self,
        grid: &SpectralGrid<T>,
        u: &SpectralField<T>,
        t: T,
        dir: &SpectralField<T>,
    ) -> SpectralField<T>;

    /// V-adjoint of `dir ↦ eval_f_prime(u, t, dir)`. The built-ins are
    /// V-self-adjoint, so the default forwards to `eval_f_prime`.
    fn eval_f_prime_adjoint(
        &self,
        grid: &SpectralGrid<T>,
        u: &SpectralField<T>,
        t: T,
        w: &SpectralField<T>,
    ) -> SpectralField<T> {
        self.eval_f_prime(grid, u, t, w)
    }

    /// Declared V-Lipschitz constant C₁ of u ↦ F(u, t).
    fn lipschitz_c1(&self) -> T;

    /// Declared L(V) bound C₂ on F′(u, t).
    fn derivative_bound_c2(&self) -> T;

    fn name(&self) -> &'static str;
}

/// Multiplicative noise map u ↦ (G₁(u,t), …, G_m(u,t)).
pub trait NoiseMap<T: Scalar>: Send + Sync {
    /// Number of noise channels m.
    fn channels(&self) -> usize;

    /// All channels G_j(u, t), j = 0..m.
    fn eval_g(&self, grid: &SpectralGrid<T>, u: &SpectralField<T>, t: T)
        -> Vec<SpectralField<T>>;

    /// Σ_j w_j·G_j(u, t) — the shape every noise or control application takes.
    fn eval_g_weighted(
        &self,
        grid: &SpectralGrid<T>,
        u: &SpectralField<T>,
        t: T,
        weights: &[T],
    ) -> SpectralField<T> {
        assert_eq!(weights.len(), self.channels(), "one weight per noise channel");
        let gs = self.eval_g(grid, u, t);
        let mut out = grid.zero_field();
        for (g, &w) in gs.iter().zip(weights) {
            out.axpy(w, g);
        }
        out
    }

    /// Declared joint (Hilbert–Schmidt) Lipschitz constant C₃ of u ↦ G(u, t).
    fn lipschitz_c3(&self) -> T;

    fn name(&self) -> &'static str;
}

/// A forcing and a noise map evaluated together by the evolution equations.
///
/// Cloning is cheap (shared immutable maps); evaluation is pure and
/// reentrant, so one set can serve many concurrent trajectories.
#[derive(Clone)]
pub struct CoefficientSet<T: Scalar> {
    pub forcing: Arc<dyn Forcing<T>>,
    pub noise: Arc<dyn NoiseMap<T>>,
}

impl<T: Scalar> CoefficientSet<T> {
    pub fn new(forcing: Arc<dyn Forcing<T>>, noise: Arc<dyn NoiseMap<T>>) -> Self {
        Self { forcing, noise }
    }

    #[inline]
    pub fn channels(&self) -> usize {
        self.noise.channels()
    }
}

/// Crate version, recorded in output manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
