//! Brute-force reference implementations used to validate the fast paths.
//!
//! Everything here is deliberately slow and transform-free: per-mode scalar
//! formulas and explicit convolution sums. Only tests should use this module.

use crate::field::{mul_i, SpectralField};
use crate::grid::SpectralGrid;
use crate::{real, Scalar, C};

/// Direct-convolution evaluation of the transport term
/// `B̂(u, v) = (I+αA)⁻¹ P Mask [q(u) × v]`, O(K⁴), with the potential
/// vorticity, convolution, mask, projection, and lift all written out
/// per mode. No FFTs are involved anywhere.
pub fn b_hat_convolution_oracle<T: Scalar>(
    grid: &SpectralGrid<T>,
    u: &SpectralField<T>,
    v: &SpectralField<T>,
) -> SpectralField<T> {
    let k = grid.k_max();
    let alpha = grid.alpha();
    let side = grid.side();
    let len = side * side;

    // q̂_p = (1+α|p|²)·i(p₁û₂ − p₂û₁), mode by mode.
    let mut qh = vec![C::new(T::zero(), T::zero()); len];
    for idx in 0..len {
        let (p1, p2) = grid.wavevector(idx);
        let sq = real::<T>((p1 * p1 + p2 * p2) as f64);
        let w = u.comp2()[idx] * real::<T>(p1 as f64) - u.comp1()[idx] * real::<T>(p2 as f64);
        qh[idx] = mul_i(w) * (T::one() + alpha * sq);
    }

    // Full convolution (q ∗ v) restricted to the lattice, with
    // q × v = q·(−v₂, v₁) taken factor by factor.
    let mut out = grid.zero_field();
    for ik in 0..len {
        let (k1, k2) = grid.wavevector(ik);
        let mut w1 = C::new(T::zero(), T::zero());
        let mut w2 = C::new(T::zero(), T::zero());
        for ip in 0..len {
            let (p1, p2) = grid.wavevector(ip);
            let (r1, r2) = (k1 - p1, k2 - p2);
            if r1.abs() > k || r2.abs() > k {
                continue;
            }
            let ir = grid.index(r1, r2);
            w1 -= qh[ip] * v.comp2()[ir];
            w2 += qh[ip] * v.comp1()[ir];
        }
        out.set(k1, k2, w1, w2);
    }

    // Mask, project, lift — written out directly.
    let d = grid.dealias_bound();
    for idx in 0..len {
        let (k1, k2) = grid.wavevector(idx);
        let (mut w1, mut w2) = (out.comp1()[idx], out.comp2()[idx]);
        if k1.abs() > d || k2.abs() > d || (k1 == 0 && k2 == 0) {
            w1 = C::new(T::zero(), T::zero());
            w2 = C::new(T::zero(), T::zero());
        } else {
            let a = real::<T>(k1 as f64);
            let b = real::<T>(k2 as f64);
            let sq = a * a + b * b;
            let dot = (w1 * a + w2 * b) * (T::one() / sq);
            w1 -= dot * a;
            w2 -= dot * b;
            let lift = T::one() / (T::one() + alpha * sq);
            w1 = w1 * lift;
            w2 = w2 * lift;
        }
        out.set(k1, k2, w1, w2);
    }
    out
}

/// Largest relative mode-wise deviation between two fields, scaled by the
/// larger of one and the reference field's largest modulus.
pub fn max_relative_mode_error<T: Scalar>(
    reference: &SpectralField<T>,
    candidate: &SpectralField<T>,
) -> T {
    assert_eq!(reference.k_max(), candidate.k_max());
    let scale = T::one().max(reference.max_abs());
    let mut worst = T::zero();
    for (a, b) in reference
        .comp1()
        .iter()
        .zip(candidate.comp1())
        .chain(reference.comp2().iter().zip(candidate.comp2()))
    {
        worst = worst.max((*a - *b).norm_sqr().sqrt());
    }
    worst / scale
}
