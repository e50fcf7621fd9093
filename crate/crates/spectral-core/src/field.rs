use crate::grid::SpectralGrid;
use crate::{real, Scalar, SpectralError, C};

/// One retained lattice mode: wavevector and its dense slot index.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Mode {
    pub k1: i32,
    pub k2: i32,
    pub idx: usize,
}

/// Which diagonal Fourier multiplier to apply to a field.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StokesMultiplier {
    /// `|k|²`: the Stokes operator A = −Δ restricted to divergence-free fields.
    Stokes,
    /// `1/(1+α|k|²)`: the lift (I+αA)⁻¹.
    InverseHelmholtz,
    /// `|k|²/(1+α|k|²)`: the effective dissipation Â = (I+αA)⁻¹A.
    EffectiveDissipation,
}

/// Multiply by the imaginary unit.
#[inline]
pub(crate) fn mul_i<T: Scalar>(z: C<T>) -> C<T> {
    C::new(-z.im, z.re)
}

/// Velocity field on the mode lattice, stored as two dense component arrays
/// indexed by `(k1+K)·(2K+1) + (k2+K)`.
///
/// Invariants expected by the operators (checked by [`SpectralField::validate`]):
/// Hermitian symmetry `û(−k) = conj(û(k))`, zero mean `û(0) = 0`, and
/// divergence-free `k·û(k) = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField<T: Scalar> {
    k_max: i32,
    side: usize,
    u1: Vec<C<T>>,
    u2: Vec<C<T>>,
}

/// Scalar quantity (vorticity, potential vorticity, …) on the same lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarSpectralField<T: Scalar> {
    k_max: i32,
    side: usize,
    values: Vec<C<T>>,
}

impl<T: Scalar> SpectralField<T> {
    pub fn zeros(k_max: i32) -> Self {
        assert!(k_max >= 2, "lattice needs k_max >= 2");
        let side = 2 * k_max as usize + 1;
        Self { k_max, side, u1: vec![C::new(T::zero(), T::zero()); side * side], u2: vec![C::new(T::zero(), T::zero()); side * side] }
    }

    #[inline]
    pub fn k_max(&self) -> i32 {
        self.k_max
    }

    #[inline]
    pub fn side(&self) -> usize {
        self.side
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.u1.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn comp1(&self) -> &[C<T>] {
        &self.u1
    }

    #[inline]
    pub fn comp2(&self) -> &[C<T>] {
        &self.u2
    }

    #[inline]
    pub fn comp1_mut(&mut self) -> &mut [C<T>] {
        &mut self.u1
    }

    #[inline]
    pub fn comp2_mut(&mut self) -> &mut [C<T>] {
        &mut self.u2
    }

    /// Both component slices mutably at once.
    #[inline]
    pub fn components_mut(&mut self) -> (&mut [C<T>], &mut [C<T>]) {
        (&mut self.u1, &mut self.u2)
    }

    #[inline]
    fn idx(&self, k1: i32, k2: i32) -> usize {
        assert!(
            k1.abs() <= self.k_max && k2.abs() <= self.k_max,
            "wavevector ({k1}, {k2}) is off the lattice (K = {})",
            self.k_max
        );
        ((k1 + self.k_max) as usize) * self.side + (k2 + self.k_max) as usize
    }

    #[inline]
    pub fn get(&self, k1: i32, k2: i32) -> (C<T>, C<T>) {
        let i = self.idx(k1, k2);
        (self.u1[i], self.u2[i])
    }

    #[inline]
    pub fn set(&mut self, k1: i32, k2: i32, v1: C<T>, v2: C<T>) {
        let i = self.idx(k1, k2);
        self.u1[i] = v1;
        self.u2[i] = v2;
    }

    /// Set û(k) = v and û(−k) = conj(v), keeping the field Hermitian.
    pub fn set_conjugate_pair(&mut self, k1: i32, k2: i32, v1: C<T>, v2: C<T>) {
        self.set(k1, k2, v1, v2);
        self.set(-k1, -k2, v1.conj(), v2.conj());
    }

    pub fn scale(&mut self, c: T) {
        for z in self.u1.iter_mut().chain(self.u2.iter_mut()) {
            *z = C::new(z.re * c, z.im * c);
        }
    }

    /// self += c·other.
    pub fn axpy(&mut self, c: T, other: &Self) {
        assert_eq!(self.k_max, other.k_max);
        for (z, w) in self.u1.iter_mut().zip(&other.u1) {
            z.re += c * w.re;
            z.im += c * w.im;
        }
        for (z, w) in self.u2.iter_mut().zip(&other.u2) {
            z.re += c * w.re;
            z.im += c * w.im;
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.axpy(T::one(), other);
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.axpy(-T::one(), other);
        out
    }

    pub fn scaled(&self, c: T) -> Self {
        let mut out = self.clone();
        out.scale(c);
        out
    }

    pub fn fill_zero(&mut self) {
        for z in self.u1.iter_mut().chain(self.u2.iter_mut()) {
            *z = C::new(T::zero(), T::zero());
        }
    }

    /// Multiply each mode of both components by a real per-slot factor.
    pub fn scale_per_mode(&mut self, table: &[T]) {
        assert_eq!(table.len(), self.u1.len());
        for (z, &m) in self.u1.iter_mut().chain(self.u2.iter_mut()).zip(table.iter().chain(table)) {
            *z = C::new(z.re * m, z.im * m);
        }
    }

    /// Largest modulus over both components and all slots.
    pub fn max_abs(&self) -> T {
        self.u1
            .iter()
            .chain(self.u2.iter())
            .map(|z| z.norm_sqr())
            .fold(T::zero(), T::max)
            .sqrt()
    }

    /// Symmetrize in place: û(−k) ← conj of the conjugate-pair average, and
    /// the k = 0 slot is forced real. Projects onto real-valued fields.
    pub fn hermitian_symmetrize(&mut self) {
        let k = self.k_max;
        for k1 in 0..=k {
            for k2 in -k..=k {
                if k1 == 0 && k2 < 0 {
                    continue;
                }
                let i = self.idx(k1, k2);
                let j = self.idx(-k1, -k2);
                if i == j {
                    self.u1[i] = C::new(self.u1[i].re, T::zero());
                    self.u2[i] = C::new(self.u2[i].re, T::zero());
                    continue;
                }
                let half = real::<T>(0.5);
                let a1 = (self.u1[i] + self.u1[j].conj()) * half;
                let a2 = (self.u2[i] + self.u2[j].conj()) * half;
                self.u1[i] = a1;
                self.u2[i] = a2;
                self.u1[j] = a1.conj();
                self.u2[j] = a2.conj();
            }
        }
    }

    /// Check Hermitian symmetry, zero mean, and zero divergence. Each mode is
    /// held to a tolerance relative to its own modulus, floored at one.
    pub fn validate(&self) -> Result<(), SpectralError> {
        let tol_rel = real::<T>(1e-12).max(T::epsilon() * real::<T>(100.0));

        let (z1, z2) = self.get(0, 0);
        if (z1.norm_sqr() + z2.norm_sqr()).sqrt() > tol_rel {
            return Err(SpectralError::Invariant(format!(
                "mean mode is nonzero: |û(0)| = {:e}",
                (z1.norm_sqr() + z2.norm_sqr()).sqrt()
            )));
        }
        let k = self.k_max;
        for k1 in -k..=k {
            for k2 in -k..=k {
                let (v1, v2) = self.get(k1, k2);
                let scale = T::one().max((v1.norm_sqr() + v2.norm_sqr()).sqrt());
                let (w1, w2) = self.get(-k1, -k2);
                let herm = ((v1 - w1.conj()).norm_sqr() + (v2 - w2.conj()).norm_sqr()).sqrt();
                if herm > tol_rel * scale {
                    return Err(SpectralError::Invariant(format!(
                        "Hermitian symmetry broken at k = ({k1}, {k2}): deviation {herm:e}"
                    )));
                }
                let div = (v1 * real::<T>(k1 as f64) + v2 * real::<T>(k2 as f64))
                    .norm_sqr()
                    .sqrt();
                if div > tol_rel * scale {
                    return Err(SpectralError::Invariant(format!(
                        "divergence at k = ({k1}, {k2}): |k·û| = {div:e}"
                    )));
                }
            }
        }
        Ok(())
    }
}

impl<T: Scalar> ScalarSpectralField<T> {
    pub fn zeros(k_max: i32) -> Self {
        assert!(k_max >= 2, "lattice needs k_max >= 2");
        let side = 2 * k_max as usize + 1;
        Self { k_max, side, values: vec![C::new(T::zero(), T::zero()); side * side] }
    }

    #[inline]
    pub fn k_max(&self) -> i32 {
        self.k_max
    }

    #[inline]
    pub fn side(&self) -> usize {
        self.side
    }

    #[inline]
    pub fn values(&self) -> &[C<T>] {
        &self.values
    }

    #[inline]
    pub fn values_mut(&mut self) -> &mut [C<T>] {
        &mut self.values
    }

    #[inline]
    fn idx(&self, k1: i32, k2: i32) -> usize {
        assert!(
            k1.abs() <= self.k_max && k2.abs() <= self.k_max,
            "wavevector ({k1}, {k2}) is off the lattice (K = {})",
            self.k_max
        );
        ((k1 + self.k_max) as usize) * self.side + (k2 + self.k_max) as usize
    }

    #[inline]
    pub fn get(&self, k1: i32, k2: i32) -> C<T> {
        self.values[self.idx(k1, k2)]
    }

    #[inline]
    pub fn set(&mut self, k1: i32, k2: i32, v: C<T>) {
        let i = self.idx(k1, k2);
        self.values[i] = v;
    }

    pub fn scale(&mut self, c: T) {
        for z in self.values.iter_mut() {
            *z = C::new(z.re * c, z.im * c);
        }
    }

    pub fn axpy(&mut self, c: T, other: &Self) {
        assert_eq!(self.k_max, other.k_max);
        for (z, w) in self.values.iter_mut().zip(&other.values) {
            z.re += c * w.re;
            z.im += c * w.im;
        }
    }
}

/// Leray projection onto divergence-free fields:
/// `û ↦ û − k (k·û)/|k|²`, with the k = 0 slot pinned to zero.
pub fn leray_project<T: Scalar>(grid: &SpectralGrid<T>, f: &SpectralField<T>) -> SpectralField<T> {
    let mut out = f.clone();
    leray_project_in_place(grid, &mut out);
    out
}

pub fn leray_project_in_place<T: Scalar>(grid: &SpectralGrid<T>, f: &mut SpectralField<T>) {
    grid.check_compatible(f.k_max());
    let side = grid.side();
    let k = grid.k_max();
    let (u1, u2) = f.components_mut();
    for idx in 0..side * side {
        let k1 = (idx / side) as i32 - k;
        let k2 = (idx % side) as i32 - k;
        if k1 == 0 && k2 == 0 {
            u1[idx] = C::new(T::zero(), T::zero());
            u2[idx] = C::new(T::zero(), T::zero());
            continue;
        }
        let a = real::<T>(k1 as f64);
        let b = real::<T>(k2 as f64);
        let sq = a * a + b * b;
        let dot = u1[idx] * a + u2[idx] * b;
        let coeff = dot * (T::one() / sq);
        u1[idx] -= coeff * a;
        u2[idx] -= coeff * b;
    }
}

/// Apply one of the diagonal Stokes-family multipliers mode by mode.
pub fn apply_stokes_multiplier<T: Scalar>(
    grid: &SpectralGrid<T>,
    f: &SpectralField<T>,
    which: StokesMultiplier,
) -> SpectralField<T> {
    grid.check_compatible(f.k_max());
    let table = match which {
        StokesMultiplier::Stokes => grid.laplacian_symbol(),
        StokesMultiplier::InverseHelmholtz => grid.inv_helmholtz_symbol(),
        StokesMultiplier::EffectiveDissipation => grid.a_hat_symbol(),
    };
    let mut out = f.clone();
    let (u1, u2) = out.components_mut();
    for (i, &m) in table.iter().enumerate() {
        u1[i] = C::new(u1[i].re * m, u1[i].im * m);
        u2[i] = C::new(u2[i].re * m, u2[i].im * m);
    }
    out
}

/// Scalar vorticity ω̂ = i(k₁û₂ − k₂û₁), the transform of ∂₁u₂ − ∂₂u₁.
pub fn curl<T: Scalar>(grid: &SpectralGrid<T>, f: &SpectralField<T>) -> ScalarSpectralField<T> {
    grid.check_compatible(f.k_max());
    let mut out = grid.zero_scalar_field();
    let side = grid.side();
    let k = grid.k_max();
    for idx in 0..side * side {
        let k1 = (idx / side) as i32 - k;
        let k2 = (idx % side) as i32 - k;
        let w = f.comp2()[idx] * real::<T>(k1 as f64) - f.comp1()[idx] * real::<T>(k2 as f64);
        out.values_mut()[idx] = mul_i(w);
    }
    out
}

/// Potential vorticity q̂ = (1+α|k|²)·i(k₁û₂ − k₂û₁), the transform of
/// curl(u − αΔu).
pub fn curl_q<T: Scalar>(grid: &SpectralGrid<T>, f: &SpectralField<T>) -> ScalarSpectralField<T> {
    let mut out = curl(grid, f);
    let alpha = grid.alpha();
    for (z, &sq) in out.values_mut().iter_mut().zip(grid.laplacian_symbol()) {
        let m = T::one() + alpha * sq;
        *z = C::new(z.re * m, z.im * m);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> SpectralGrid<f64> {
        SpectralGrid::new(4, 1.0, 0.1).unwrap()
    }

    fn single_mode(g: &SpectralGrid<f64>, k1: i32, k2: i32) -> SpectralField<f64> {
        // Divergence-free direction k⊥/|k| with a unit complex amplitude.
        let n = ((k1 * k1 + k2 * k2) as f64).sqrt();
        let (d1, d2) = (-(k2 as f64) / n, (k1 as f64) / n);
        let mut f = g.zero_field();
        let a = C::new(0.3, -0.4);
        f.set_conjugate_pair(k1, k2, a * d1, a * d2);
        f
    }

    #[test]
    fn leray_kills_gradients_and_fixes_divergence_free() {
        let g = grid();
        let f = single_mode(&g, 2, 1);
        let pf = leray_project(&g, &f);
        for i in 0..g.lattice_len() {
            assert!((pf.comp1()[i] - f.comp1()[i]).norm() < 1e-15);
            assert!((pf.comp2()[i] - f.comp2()[i]).norm() < 1e-15);
        }

        // A pure gradient mode û ∝ k projects to zero.
        let mut grad = g.zero_field();
        let a = C::new(1.0, 2.0);
        grad.set_conjugate_pair(1, 2, a * 1.0, a * 2.0);
        let pg = leray_project(&g, &grad);
        assert!(pg.max_abs() < 1e-15);
    }

    #[test]
    fn validate_catches_broken_invariants() {
        let g = grid();
        let mut f = single_mode(&g, 1, 0);
        assert!(f.validate().is_ok());

        f.set(0, 0, C::new(1.0, 0.0), C::new(0.0, 0.0));
        assert!(f.validate().is_err());

        let mut h = single_mode(&g, 1, 0);
        h.set(1, 0, C::new(0.0, 0.0), C::new(1.0, 0.0)); // breaks symmetry
        assert!(h.validate().is_err());

        let mut d = g.zero_field();
        d.set_conjugate_pair(1, 1, C::new(1.0, 0.0), C::new(1.0, 0.0)); // k·û ≠ 0
        assert!(d.validate().is_err());
    }

    #[test]
    fn stokes_multiplier_tables() {
        let g = grid();
        let f = single_mode(&g, 1, 0);
        let af = apply_stokes_multiplier(&g, &f, StokesMultiplier::Stokes);
        let hf = apply_stokes_multiplier(&g, &f, StokesMultiplier::InverseHelmholtz);
        let ef = apply_stokes_multiplier(&g, &f, StokesMultiplier::EffectiveDissipation);
        let (v1, _) = f.get(1, 0);
        // α = 1, |k|² = 1: A ↦ 1, (I+αA)⁻¹ ↦ 1/2, Â ↦ 1/2.
        assert!((af.get(1, 0).0 - v1).norm() < 1e-15);
        assert!((hf.get(1, 0).0 - v1 * 0.5).norm() < 1e-15);
        assert!((ef.get(1, 0).0 - v1 * 0.5).norm() < 1e-15);
    }

    #[test]
    fn curl_and_potential_vorticity_single_mode() {
        let g = grid();
        let mut f = g.zero_field();
        // û(1,2) along k⊥ = (−2,1)/√5 with amplitude 1.
        let n = 5.0f64.sqrt();
        f.set_conjugate_pair(1, 2, C::new(-2.0 / n, 0.0), C::new(1.0 / n, 0.0));
        let w = curl(&g, &f);
        // ω̂ = i(k₁û₂ − k₂û₁) = i(1·(1/√5) − 2·(−2/√5)) = i√5.
        assert!((w.get(1, 2) - C::new(0.0, n)).norm() < 1e-14);
        let q = curl_q(&g, &f);
        // q̂ = (1+α|k|²)ω̂ = 6·i√5 at α = 1.
        assert!((q.get(1, 2) - C::new(0.0, 6.0 * n)).norm() < 1e-13);
    }

    #[test]
    fn symmetrize_projects_onto_hermitian_fields() {
        let g = grid();
        let mut f = g.zero_field();
        f.set(3, -2, C::new(1.0, 1.0), C::new(0.0, 2.0));
        f.set(0, 0, C::new(0.5, 0.7), C::new(0.0, 0.0));
        f.hermitian_symmetrize();
        let (a1, _) = f.get(3, -2);
        let (b1, _) = f.get(-3, 2);
        assert!((a1 - b1.conj()).norm() < 1e-15);
        assert_eq!(f.get(0, 0).0.im, 0.0);
        // Idempotent.
        let before = f.clone();
        f.hermitian_symmetrize();
        assert_eq!(before, f);
    }
}
