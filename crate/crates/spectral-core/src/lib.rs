//! Divergence-free Fourier representation of 2D velocity fields on the
//! zero-mean periodic torus `[0, 2π)²`, together with the operators of the
//! α-regularized (second grade) fluid model:
//!
//! * Stokes multipliers `|k|²`, `1/(1+α|k|²)`, `|k|²/(1+α|k|²)` (the operators
//!   `A`, `(I+αA)⁻¹`, `Â`),
//! * the Helmholtz–Leray projection,
//! * the potential vorticity `q = curl(u − αΔu)` and the bilinear transport
//!   term `B̂(u, v) = (I+αA)⁻¹ P[q(u) × v]`, evaluated pseudospectrally with
//!   2/3-rule dealiasing on a collocation grid of at least `3K+1` points per
//!   axis (quadratic products are then alias-free),
//! * the inner products, norms and eigenvalue relations of the V/W scale of
//!   spaces, with the Parseval convention that all pairings are plain
//!   coefficient sums (no `(2π)²` factors).
//!
//! Fields are truncated to the lattice `|k₁|, |k₂| ≤ K`, `k ≠ 0`; the `k = 0`
//! mode is pinned to zero permanently, which makes Poincaré's inequality hold
//! with constant 1. All operations are pure; values are safe to share
//! read-only across threads.

mod error;
mod field;
mod grid;
mod nonlinear;
mod random;
mod snapshot;
pub mod testing;
mod transform;

pub use error::SpectralError;
pub use field::{
    apply_stokes_multiplier, curl, curl_q, leray_project, leray_project_in_place, Mode,
    ScalarSpectralField, SpectralField, StokesMultiplier,
};
pub use grid::SpectralGrid;
pub use nonlinear::{
    b_hat, bilinear_sum_about, cross_inner, linearized_b_sum, linearized_b_sum_adjoint,
    physical_cache, trilinear_b, PhysicalCache,
};
pub use random::random_field;
pub use snapshot::{read_g2sf, write_g2sf};
pub use transform::{dealias, dealias_in_place, is_dealiased, transform_roundtrip};

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};
use std::fmt;
use std::iter::Sum;

/// Scalar types the spectral kernels are generic over: `f32` and `f64`.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + rustfft::FftNum
    + Sum<Self>
    + fmt::Display
    + fmt::LowerExp
{
}

impl<T> Scalar for T where
    T: Float
        + FloatConst
        + FromPrimitive
        + ToPrimitive
        + NumAssign
        + rustfft::FftNum
        + Sum<T>
        + fmt::Display
        + fmt::LowerExp
{
}

/// Shorthand for the ubiquitous exact `f64 -> T` constant conversions.
#[inline]
pub fn real<T: Scalar>(x: f64) -> T {
    T::from_f64(x).expect("finite f64 converts to any Scalar")
}

pub(crate) type C<T> = Complex<T>;

pub type Grid64 = SpectralGrid<f64>;
pub type Field64 = SpectralField<f64>;
pub type ScalarField64 = ScalarSpectralField<f64>;
pub type Grid32 = SpectralGrid<f32>;
pub type Field32 = SpectralField<f32>;

/// Crate version, recorded in output manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
