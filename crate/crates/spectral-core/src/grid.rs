use crate::field::{curl_q, Mode, ScalarSpectralField, SpectralField};
use crate::{real, Scalar, SpectralError};
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

/// Mode lattice `|k₁|, |k₂| ≤ K, k ≠ 0` with physical parameters and
/// precomputed per-mode multiplier tables.
///
/// The collocation side `M` used for pseudospectral products defaults to the
/// smallest 5-smooth integer ≥ 3K+1, which renders quadratic products
/// alias-free on every retained mode and cubic quadratures exact.
pub struct SpectralGrid<T: Scalar> {
    k_max: i32,
    alpha: T,
    nu: T,
    dealias_bound: i32,
    side: usize,
    collocation: usize,
    /// `|k|²` per lattice slot (0 at the pinned k = 0 slot).
    laplacian: Vec<T>,
    /// `1/(1+α|k|²)` per lattice slot.
    inv_helmholtz: Vec<T>,
    /// `|k|²/(1+α|k|²)` per lattice slot, the symbol of Â.
    a_hat: Vec<T>,
    pub(crate) fft_fwd: Arc<dyn Fft<T>>,
    pub(crate) fft_inv: Arc<dyn Fft<T>>,
}

impl<T: Scalar> Clone for SpectralGrid<T> {
    fn clone(&self) -> Self {
        Self {
            k_max: self.k_max,
            alpha: self.alpha,
            nu: self.nu,
            dealias_bound: self.dealias_bound,
            side: self.side,
            collocation: self.collocation,
            laplacian: self.laplacian.clone(),
            inv_helmholtz: self.inv_helmholtz.clone(),
            a_hat: self.a_hat.clone(),
            fft_fwd: Arc::clone(&self.fft_fwd),
            fft_inv: Arc::clone(&self.fft_inv),
        }
    }
}

fn is_5_smooth(mut n: usize) -> bool {
    for p in [2, 3, 5] {
        while n % p == 0 {
            n /= p;
        }
    }
    n == 1
}

fn smallest_5_smooth_at_least(n: usize) -> usize {
    (n..).find(|&m| is_5_smooth(m)).expect("5-smooth numbers are unbounded")
}

impl<T: Scalar> SpectralGrid<T> {
    /// Grid with the default alias-free collocation side (≥ 3K+1, 5-smooth).
    pub fn new(k_max: u32, alpha: T, nu: T) -> Result<Self, SpectralError> {
        let m = smallest_5_smooth_at_least(3 * k_max as usize + 1);
        Self::with_collocation(k_max, alpha, nu, m)
    }

    /// Grid with an explicit collocation side. Sides below 2K+1 cannot even
    /// represent the lattice and are rejected.
    pub fn with_collocation(
        k_max: u32,
        alpha: T,
        nu: T,
        collocation: usize,
    ) -> Result<Self, SpectralError> {
        if k_max < 2 {
            return Err(SpectralError::KMaxTooSmall(k_max));
        }
        if alpha <= T::zero() {
            return Err(SpectralError::NonPositive("alpha"));
        }
        if nu <= T::zero() {
            return Err(SpectralError::NonPositive("nu"));
        }
        let min = 2 * k_max as usize + 1;
        if collocation < min {
            return Err(SpectralError::CollocationTooSmall { got: collocation, min });
        }

        let k = k_max as i32;
        let side = 2 * k_max as usize + 1;
        let len = side * side;
        let mut laplacian = vec![T::zero(); len];
        let mut inv_helmholtz = vec![T::zero(); len];
        let mut a_hat = vec![T::zero(); len];
        for k1 in -k..=k {
            for k2 in -k..=k {
                let idx = ((k1 + k) as usize) * side + (k2 + k) as usize;
                let sq = real::<T>((k1 as f64).powi(2) + (k2 as f64).powi(2));
                let helm = T::one() + alpha * sq;
                laplacian[idx] = sq;
                inv_helmholtz[idx] = T::one() / helm;
                a_hat[idx] = sq / helm;
            }
        }

        let mut planner = FftPlanner::new();
        let fft_fwd = planner.plan_fft_forward(collocation);
        let fft_inv = planner.plan_fft_inverse(collocation);

        Ok(Self {
            k_max: k,
            alpha,
            nu,
            dealias_bound: 2 * k / 3,
            side,
            collocation,
            laplacian,
            inv_helmholtz,
            a_hat,
            fft_fwd,
            fft_inv,
        })
    }

    #[inline]
    pub fn k_max(&self) -> i32 {
        self.k_max
    }

    #[inline]
    pub fn alpha(&self) -> T {
        self.alpha
    }

    #[inline]
    pub fn nu(&self) -> T {
        self.nu
    }

    /// Largest |k_i| kept by the 2/3 dealiasing rule, ⌊2K/3⌋.
    #[inline]
    pub fn dealias_bound(&self) -> i32 {
        self.dealias_bound
    }

    /// Lattice side 2K+1.
    #[inline]
    pub fn side(&self) -> usize {
        self.side
    }

    /// Collocation (physical grid) side M.
    #[inline]
    pub fn collocation(&self) -> usize {
        self.collocation
    }

    /// Number of lattice slots, (2K+1)².
    #[inline]
    pub fn lattice_len(&self) -> usize {
        self.side * self.side
    }

    /// Dense slot index of wavevector (k1, k2). Panics off the lattice.
    #[inline]
    pub fn index(&self, k1: i32, k2: i32) -> usize {
        debug_assert!(k1.abs() <= self.k_max && k2.abs() <= self.k_max);
        ((k1 + self.k_max) as usize) * self.side + (k2 + self.k_max) as usize
    }

    /// Wavevector of a dense slot index.
    #[inline]
    pub fn wavevector(&self, idx: usize) -> (i32, i32) {
        let k1 = (idx / self.side) as i32 - self.k_max;
        let k2 = (idx % self.side) as i32 - self.k_max;
        (k1, k2)
    }

    /// All nonzero lattice modes in row-major order (k1 outer, k2 inner).
    pub fn modes(&self) -> impl Iterator<Item = Mode> + '_ {
        (0..self.lattice_len()).filter_map(move |idx| {
            let (k1, k2) = self.wavevector(idx);
            (k1 != 0 || k2 != 0).then_some(Mode { k1, k2, idx })
        })
    }

    #[inline]
    pub fn laplacian_symbol(&self) -> &[T] {
        &self.laplacian
    }

    #[inline]
    pub fn inv_helmholtz_symbol(&self) -> &[T] {
        &self.inv_helmholtz
    }

    #[inline]
    pub fn a_hat_symbol(&self) -> &[T] {
        &self.a_hat
    }

    pub fn zero_field(&self) -> SpectralField<T> {
        SpectralField::zeros(self.k_max)
    }

    pub fn zero_scalar_field(&self) -> ScalarSpectralField<T> {
        ScalarSpectralField::zeros(self.k_max)
    }

    pub(crate) fn check_compatible(&self, field_k_max: i32) {
        assert_eq!(
            field_k_max, self.k_max,
            "field lattice K = {} does not match grid K = {}",
            field_k_max, self.k_max
        );
    }

    /// Eigenvalue ratio λ_k = ‖e_k‖²_W / ‖e_k‖²_V = 1 + |k|²(1+α|k|²) of a
    /// divergence-free Fourier mode. Rejects k = 0 and off-lattice k.
    pub fn eigen_lambda(&self, k1: i32, k2: i32) -> Result<T, SpectralError> {
        if k1 == 0 && k2 == 0 {
            return Err(SpectralError::OffLattice(0, 0));
        }
        if k1.abs() > self.k_max || k2.abs() > self.k_max {
            return Err(SpectralError::OffLattice(k1, k2));
        }
        let sq = real::<T>((k1 as f64).powi(2) + (k2 as f64).powi(2));
        Ok(T::one() + sq * (T::one() + self.alpha * sq))
    }

    /// L² pairing (u, v) = Σ û_k · conj(v̂_k); real for Hermitian fields.
    pub fn inner_l2(&self, u: &SpectralField<T>, v: &SpectralField<T>) -> T {
        self.check_compatible(u.k_max());
        self.check_compatible(v.k_max());
        let mut acc = T::zero();
        for i in 0..self.lattice_len() {
            acc += (u.comp1()[i] * v.comp1()[i].conj()).re;
            acc += (u.comp2()[i] * v.comp2()[i].conj()).re;
        }
        acc
    }

    /// H¹ seminorm pairing ((u, v)) = Σ |k|² û_k · conj(v̂_k).
    pub fn inner_h1(&self, u: &SpectralField<T>, v: &SpectralField<T>) -> T {
        self.check_compatible(u.k_max());
        self.check_compatible(v.k_max());
        let mut acc = T::zero();
        for i in 0..self.lattice_len() {
            let dot = (u.comp1()[i] * v.comp1()[i].conj()).re
                + (u.comp2()[i] * v.comp2()[i].conj()).re;
            acc += self.laplacian[i] * dot;
        }
        acc
    }

    /// (u, v)_V = (u, v) + α((u, v)).
    pub fn inner_v(&self, u: &SpectralField<T>, v: &SpectralField<T>) -> T {
        self.check_compatible(u.k_max());
        self.check_compatible(v.k_max());
        let mut acc = T::zero();
        for i in 0..self.lattice_len() {
            let dot = (u.comp1()[i] * v.comp1()[i].conj()).re
                + (u.comp2()[i] * v.comp2()[i].conj()).re;
            acc += (T::one() + self.alpha * self.laplacian[i]) * dot;
        }
        acc
    }

    /// Pairing of potential vorticities (q_u, q_v).
    pub fn inner_star(&self, u: &SpectralField<T>, v: &SpectralField<T>) -> T {
        let qu = curl_q(self, u);
        let qv = curl_q(self, v);
        self.scalar_inner_l2(&qu, &qv)
    }

    /// (u, v)_W = (u, v)_V + (q_u, q_v).
    pub fn inner_w(&self, u: &SpectralField<T>, v: &SpectralField<T>) -> T {
        self.inner_v(u, v) + self.inner_star(u, v)
    }

    pub fn scalar_inner_l2(&self, a: &ScalarSpectralField<T>, b: &ScalarSpectralField<T>) -> T {
        self.check_compatible(a.k_max());
        self.check_compatible(b.k_max());
        let mut acc = T::zero();
        for i in 0..self.lattice_len() {
            acc += (a.values()[i] * b.values()[i].conj()).re;
        }
        acc
    }

    pub fn norm_l2(&self, u: &SpectralField<T>) -> T {
        self.inner_l2(u, u).max(T::zero()).sqrt()
    }

    pub fn norm_h1(&self, u: &SpectralField<T>) -> T {
        self.inner_h1(u, u).max(T::zero()).sqrt()
    }

    pub fn norm_v(&self, u: &SpectralField<T>) -> T {
        self.inner_v(u, u).max(T::zero()).sqrt()
    }

    pub fn norm_w(&self, u: &SpectralField<T>) -> T {
        self.inner_w(u, u).max(T::zero()).sqrt()
    }

    pub fn norm_star(&self, u: &SpectralField<T>) -> T {
        let q = curl_q(self, u);
        self.scalar_inner_l2(&q, &q).max(T::zero()).sqrt()
    }
}
