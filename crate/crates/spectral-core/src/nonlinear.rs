//! Pseudospectral evaluation of the transport nonlinearity
//! `B̂(u, v) = (I+αA)⁻¹ P [q(u) × v]`, its linearization about a frozen
//! state, and the exact V-inner-product adjoint of that linearization.
//!
//! All products are formed on the collocation grid (M ≥ 3K+1 per axis), so
//! quadratic products are alias-free on every retained mode and cubic
//! quadratures are exact; the 2/3-rule mask is still applied to every product
//! so that evolved states never carry modes beyond the dealiasing bound.

use crate::field::{curl_q, leray_project_in_place, mul_i, ScalarSpectralField, SpectralField};
use crate::grid::SpectralGrid;
use crate::transform::{
    dealias_in_place, field_to_physical, forward_pair_into, forward_single_into, inverse_pair,
    scalar_to_physical,
};
use crate::{real, Scalar, C};

/// Collocation-grid samples of a velocity field and its potential vorticity.
///
/// Building the cache costs two transforms; every transport product against
/// the cached field then reuses it for free. Frozen deterministic states in
/// linearized equations are the intended use.
pub struct PhysicalCache<T: Scalar> {
    /// First velocity component at the collocation points.
    pub ux: Vec<T>,
    /// Second velocity component at the collocation points.
    pub uy: Vec<T>,
    /// Potential vorticity q = curl(u − αΔu) at the collocation points.
    pub q: Vec<T>,
}

/// Sample a field and its potential vorticity on the collocation grid.
pub fn physical_cache<T: Scalar>(
    grid: &SpectralGrid<T>,
    u: &SpectralField<T>,
) -> PhysicalCache<T> {
    grid.check_compatible(u.k_max());
    let (ux, uy) = field_to_physical(grid, u);
    let q = scalar_to_physical(grid, &curl_q(grid, u));
    PhysicalCache { ux, uy, q }
}

/// Shared tail of every transport product: forward-transform the physical
/// product pair, mask, project, and lift by (I+αA)⁻¹.
fn finalize_transport<T: Scalar>(grid: &SpectralGrid<T>, p1: &[T], p2: &[T]) -> SpectralField<T> {
    let mut out = grid.zero_field();
    {
        let (u1, u2) = out.components_mut();
        forward_pair_into(grid, p1, p2, u1, u2);
    }
    dealias_in_place(grid, &mut out);
    leray_project_in_place(grid, &mut out);
    out.scale_per_mode(grid.inv_helmholtz_symbol());
    out
}

/// Transport term B̂(u, v) = (I+αA)⁻¹ P [q(u) × v], where the cross product
/// of the scalar q with the vector v is q·(−v₂, v₁).
pub fn b_hat<T: Scalar>(
    grid: &SpectralGrid<T>,
    u: &SpectralField<T>,
    v: &SpectralField<T>,
) -> SpectralField<T> {
    grid.check_compatible(u.k_max());
    grid.check_compatible(v.k_max());
    let q = scalar_to_physical(grid, &curl_q(grid, u));
    let (vx, vy) = field_to_physical(grid, v);
    let n = q.len();
    let mut p1 = Vec::with_capacity(n);
    let mut p2 = Vec::with_capacity(n);
    for j in 0..n {
        p1.push(-q[j] * vy[j]);
        p2.push(q[j] * vx[j]);
    }
    finalize_transport(grid, &p1, &p2)
}

/// B̂(x, u⁰ + shift·x) + B̂(u⁰, x) in one fused product, where `frozen` caches
/// u⁰. With shift = 0 this is the linearization of B̂ about u⁰ applied to x;
/// with shift > 0 it is the drift shape of centered, rescaled deviations.
pub fn bilinear_sum_about<T: Scalar>(
    grid: &SpectralGrid<T>,
    frozen: &PhysicalCache<T>,
    x: &SpectralField<T>,
    shift: T,
) -> SpectralField<T> {
    grid.check_compatible(x.k_max());
    let qx = scalar_to_physical(grid, &curl_q(grid, x));
    let (xx, xy) = field_to_physical(grid, x);
    let n = qx.len();
    assert_eq!(frozen.ux.len(), n, "frozen cache was built on a different grid");
    let mut p1 = Vec::with_capacity(n);
    let mut p2 = Vec::with_capacity(n);
    for j in 0..n {
        let wx = frozen.ux[j] + shift * xx[j];
        let wy = frozen.uy[j] + shift * xy[j];
        p1.push(-qx[j] * wy - frozen.q[j] * xy[j]);
        p2.push(qx[j] * wx + frozen.q[j] * xx[j]);
    }
    finalize_transport(grid, &p1, &p2)
}

/// B̂(x, u⁰) + B̂(u⁰, x): the linearization of the transport term about u⁰.
pub fn linearized_b_sum<T: Scalar>(
    grid: &SpectralGrid<T>,
    frozen: &PhysicalCache<T>,
    x: &SpectralField<T>,
) -> SpectralField<T> {
    bilinear_sum_about(grid, frozen, x, T::zero())
}

/// Exact adjoint of [`linearized_b_sum`] in the V inner product:
/// ⟨B̂(x,u⁰)+B̂(u⁰,x), w⟩_V = ⟨x, adjoint(w)⟩_V for every x, w on the lattice.
///
/// Derivation sketch: ⟨(I+αA)⁻¹z, w⟩_V = (z, w)_{L²}, the mask and Leray
/// projector move onto w, and the two product terms transpose as
/// (q(x)×u⁰, y) = (x, Q*[u⁰₁y₂−u⁰₂y₁]) with Q*ŝ = (1+α|k|²)(ik₂ŝ, −ik₁ŝ),
/// and (q(u⁰)×x, y) = −(q(u⁰)×y, x), where y = Mask P w. The collocation
/// grid makes each cubic pairing exact, so the identity holds to roundoff.
pub fn linearized_b_sum_adjoint<T: Scalar>(
    grid: &SpectralGrid<T>,
    frozen: &PhysicalCache<T>,
    w: &SpectralField<T>,
) -> SpectralField<T> {
    grid.check_compatible(w.k_max());
    let mut y = w.clone();
    dealias_in_place(grid, &mut y);
    leray_project_in_place(grid, &mut y);
    let (y1, y2) = inverse_pair(grid, y.comp1(), y.comp2());
    let n = y1.len();
    assert_eq!(frozen.ux.len(), n, "frozen cache was built on a different grid");

    let mut s = Vec::with_capacity(n);
    let mut c1 = Vec::with_capacity(n);
    let mut c2 = Vec::with_capacity(n);
    for j in 0..n {
        s.push(frozen.ux[j] * y2[j] - frozen.uy[j] * y1[j]);
        c1.push(-frozen.q[j] * y2[j]);
        c2.push(frozen.q[j] * y1[j]);
    }

    let mut s_hat = vec![C::new(T::zero(), T::zero()); grid.lattice_len()];
    forward_single_into(grid, &s, &mut s_hat);
    let mut out = grid.zero_field();
    {
        let (o1, o2) = out.components_mut();
        forward_pair_into(grid, &c1, &c2, o1, o2);
        for (idx, &sv) in s_hat.iter().enumerate() {
            let (k1, k2) = grid.wavevector(idx);
            let m = T::one() + grid.alpha() * grid.laplacian_symbol()[idx];
            let g1 = mul_i(sv) * (m * real::<T>(k2 as f64));
            let g2 = mul_i(sv) * (-m * real::<T>(k1 as f64));
            o1[idx] = g1 - o1[idx];
            o2[idx] = g2 - o2[idx];
        }
    }
    leray_project_in_place(grid, &mut out);
    out.scale_per_mode(grid.inv_helmholtz_symbol());
    out
}

/// Trilinear advection form b(u, v, w) = ((u·∇)v, w)_{L²}, evaluated by
/// collocation quadrature with spectral derivatives (exact for lattice
/// fields since 3K ≤ M−1).
pub fn trilinear_b<T: Scalar>(
    grid: &SpectralGrid<T>,
    u: &SpectralField<T>,
    v: &SpectralField<T>,
    w: &SpectralField<T>,
) -> T {
    grid.check_compatible(u.k_max());
    grid.check_compatible(v.k_max());
    grid.check_compatible(w.k_max());
    let len = grid.lattice_len();
    let mut d1v1 = vec![C::new(T::zero(), T::zero()); len];
    let mut d2v1 = d1v1.clone();
    let mut d1v2 = d1v1.clone();
    let mut d2v2 = d1v1.clone();
    for idx in 0..len {
        let (k1, k2) = grid.wavevector(idx);
        let a = real::<T>(k1 as f64);
        let b = real::<T>(k2 as f64);
        d1v1[idx] = mul_i(v.comp1()[idx]) * a;
        d2v1[idx] = mul_i(v.comp1()[idx]) * b;
        d1v2[idx] = mul_i(v.comp2()[idx]) * a;
        d2v2[idx] = mul_i(v.comp2()[idx]) * b;
    }
    let (ux, uy) = field_to_physical(grid, u);
    let (wx, wy) = field_to_physical(grid, w);
    let (g11, g21) = inverse_pair(grid, &d1v1, &d2v1);
    let (g12, g22) = inverse_pair(grid, &d1v2, &d2v2);
    let mut acc = T::zero();
    for j in 0..ux.len() {
        let adv1 = ux[j] * g11[j] + uy[j] * g21[j];
        let adv2 = ux[j] * g12[j] + uy[j] * g22[j];
        acc += adv1 * wx[j] + adv2 * wy[j];
    }
    acc / real::<T>((ux.len()) as f64)
}

/// L² pairing ((q × v), w) of a scalar-vorticity cross product against a
/// vector field, by exact collocation quadrature.
pub fn cross_inner<T: Scalar>(
    grid: &SpectralGrid<T>,
    q: &ScalarSpectralField<T>,
    v: &SpectralField<T>,
    w: &SpectralField<T>,
) -> T {
    grid.check_compatible(q.k_max());
    grid.check_compatible(v.k_max());
    grid.check_compatible(w.k_max());
    let qp = scalar_to_physical(grid, q);
    let (vx, vy) = field_to_physical(grid, v);
    let (wx, wy) = field_to_physical(grid, w);
    let mut acc = T::zero();
    for j in 0..qp.len() {
        acc += qp[j] * (vx[j] * wy[j] - vy[j] * wx[j]);
    }
    acc / real::<T>((qp.len()) as f64)
}
