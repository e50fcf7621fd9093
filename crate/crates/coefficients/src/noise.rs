use crate::NoiseMap;
use spectral_core::{dealias_in_place, random_field, Scalar, SpectralField, SpectralGrid};

fn mix_seed(seed: u64, salt: u64) -> u64 {
    seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(salt)
}

/// G_j(u) = σ_j·(u, φ_j)_V·ψ_j with fixed unit-V-norm divergence-free
/// channel shapes φ_j, ψ_j drawn deterministically from a seed and dealiased
/// so that evolved states excite them exactly.
///
/// The joint Lipschitz constant is √(Σσ_j²): each channel difference is
/// σ_j·(Δu, φ_j)_V·ψ_j with ‖ψ_j‖_V = 1 and |(Δu, φ_j)_V| ≤ ‖Δu‖_V.
pub struct ProjectionG<T: Scalar> {
    sigmas: Vec<T>,
    phis: Vec<SpectralField<T>>,
    psis: Vec<SpectralField<T>>,
    c3: T,
}

impl<T: Scalar> ProjectionG<T> {
    pub fn new(grid: &SpectralGrid<T>, sigmas: Vec<T>, seed: u64) -> Self {
        assert!(!sigmas.is_empty(), "at least one noise channel");
        assert!(sigmas.iter().all(|s| *s >= T::zero()), "channel gains must be nonnegative");
        let shape = |salt: u64| {
            let mut f = random_field(grid, mix_seed(seed, salt), 3.0)
                .expect("slope 3 exceeds the admissible threshold");
            dealias_in_place(grid, &mut f);
            let n = grid.norm_v(&f);
            assert!(n > T::zero(), "channel shape must be nonzero");
            f.scale(T::one() / n);
            f
        };
        let phis: Vec<_> = (0..sigmas.len()).map(|j| shape(2 * j as u64)).collect();
        let psis: Vec<_> = (0..sigmas.len()).map(|j| shape(2 * j as u64 + 1)).collect();
        let c3 = sigmas.iter().map(|s| *s * *s).fold(T::zero(), |a, b| a + b).sqrt();
        Self { sigmas, phis, psis, c3 }
    }

    pub fn sigmas(&self) -> &[T] {
        &self.sigmas
    }
}

impl<T: Scalar> NoiseMap<T> for ProjectionG<T> {
    fn channels(&self) -> usize {
        self.sigmas.len()
    }

    fn eval_g(
        &self,
        grid: &SpectralGrid<T>,
        u: &SpectralField<T>,
        _t: T,
    ) -> Vec<SpectralField<T>> {
        self.sigmas
            .iter()
            .zip(self.phis.iter().zip(&self.psis))
            .map(|(&sigma, (phi, psi))| psi.scaled(sigma * grid.inner_v(u, phi)))
            .collect()
    }

    fn eval_g_weighted(
        &self,
        grid: &SpectralGrid<T>,
        u: &SpectralField<T>,
        _t: T,
        weights: &[T],
    ) -> SpectralField<T> {
        assert_eq!(weights.len(), self.channels(), "one weight per noise channel");
        let mut out = grid.zero_field();
        for ((&sigma, (phi, psi)), &w) in
            self.sigmas.iter().zip(self.phis.iter().zip(&self.psis)).zip(weights)
        {
            out.axpy(w * sigma * grid.inner_v(u, phi), psi);
        }
        out
    }

    fn lipschitz_c3(&self) -> T {
        self.c3
    }

    fn name(&self) -> &'static str {
        "projection-noise"
    }
}

/// G_j(u) = σ_j·u: every channel shakes the full state. Joint Lipschitz
/// constant √(Σσ_j²), attained by every pair.
#[derive(Debug, Clone)]
pub struct DiagonalG<T: Scalar> {
    sigmas: Vec<T>,
    c3: T,
}

impl<T: Scalar> DiagonalG<T> {
    pub fn new(sigmas: Vec<T>) -> Self {
        assert!(!sigmas.is_empty(), "at least one noise channel");
        assert!(sigmas.iter().all(|s| *s >= T::zero()), "channel gains must be nonnegative");
        let c3 = sigmas.iter().map(|s| *s * *s).fold(T::zero(), |a, b| a + b).sqrt();
        Self { sigmas, c3 }
    }

    pub fn sigmas(&self) -> &[T] {
        &self.sigmas
    }
}

impl<T: Scalar> NoiseMap<T> for DiagonalG<T> {
    fn channels(&self) -> usize {
        self.sigmas.len()
    }

    fn eval_g(
        &self,
        _grid: &SpectralGrid<T>,
        u: &SpectralField<T>,
        _t: T,
    ) -> Vec<SpectralField<T>> {
        self.sigmas.iter().map(|&s| u.scaled(s)).collect()
    }

    fn eval_g_weighted(
        &self,
        _grid: &SpectralGrid<T>,
        u: &SpectralField<T>,
        _t: T,
        weights: &[T],
    ) -> SpectralField<T> {
        assert_eq!(weights.len(), self.channels(), "one weight per noise channel");
        let total = self.sigmas.iter().zip(weights).map(|(&s, &w)| s * w).fold(T::zero(), |a, b| a + b);
        u.scaled(total)
    }

    fn lipschitz_c3(&self) -> T {
        self.c3
    }

    fn name(&self) -> &'static str {
        "diagonal-noise"
    }
}
