//! Seeded random divergence-free fields with power-law spectra.

use crate::field::{leray_project_in_place, SpectralField};
use crate::grid::SpectralGrid;
use crate::{real, Scalar, SpectralError, C};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Random field with `|û_k| ∝ |k|^{-slope}` and unit-variance complex
/// Gaussian mode amplitudes, Hermitian-symmetrized and Leray-projected.
/// Deterministic in the seed: modes are drawn in a fixed half-lattice order
/// (k₁ > 0 first, then the k₁ = 0, k₂ > 0 line) from a counter-seeded
/// ChaCha stream.
///
/// Slopes must exceed 1 so that the W-norm stays summable as K grows.
pub fn random_field<T: Scalar>(
    grid: &SpectralGrid<T>,
    seed: u64,
    slope: f64,
) -> Result<SpectralField<T>, SpectralError> {
    if !(slope > 1.0) {
        return Err(SpectralError::SlopeTooShallow(slope));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = grid.k_max();
    let mut f = grid.zero_field();
    let inv_sqrt2 = std::f64::consts::FRAC_1_SQRT_2;
    for k1 in 0..=k {
        for k2 in -k..=k {
            if k1 == 0 && k2 <= 0 {
                continue;
            }
            let amp = (((k1 * k1 + k2 * k2) as f64).sqrt()).powf(-slope) * inv_sqrt2;
            let n: [f64; 4] = [
                rng.sample(StandardNormal),
                rng.sample(StandardNormal),
                rng.sample(StandardNormal),
                rng.sample(StandardNormal),
            ];
            let v1 = C::new(real::<T>(n[0] * amp), real::<T>(n[1] * amp));
            let v2 = C::new(real::<T>(n[2] * amp), real::<T>(n[3] * amp));
            f.set_conjugate_pair(k1, k2, v1, v2);
        }
    }
    leray_project_in_place(grid, &mut f);
    Ok(f)
}
