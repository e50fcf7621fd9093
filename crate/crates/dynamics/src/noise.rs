//! Reproducible Brownian increments over a fixed time grid.
//!
//! Increments are generated *counter-based*: every `(channel, step)` cell of a
//! path is hashed together with the path seed into a 64-bit state, which seeds
//! a short-lived ChaCha stream producing exactly one standard normal draw.
//! Because each cell depends only on `(seed, channel, step)`, paths are
//! reproducible regardless of evaluation order, independent seeds give
//! independent streams, and Monte Carlo workers never share generator state.

use crate::error::DynamicsError;
use crate::time::TimeGrid;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use spectral_core::{real, Scalar};

/// One stage of the SplitMix64 output permutation; a cheap, well-mixed
/// 64-bit hash used to derive per-cell and per-sample seeds.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives the seed of Monte Carlo sample `sample_index` from an ensemble
/// root seed.  Distinct indices land in distinct hash chains, so per-sample
/// paths are mutually independent and can be generated in any order.
pub fn sample_seed(root: u64, sample_index: u64) -> u64 {
    splitmix64(splitmix64(root) ^ splitmix64(sample_index.wrapping_add(1)))
}

fn cell_state(seed: u64, channel: usize, step: usize) -> u64 {
    let h = splitmix64(seed);
    let h = splitmix64(h ^ (channel as u64).wrapping_add(1));
    splitmix64(h ^ (step as u64).wrapping_add(1))
}

/// Discrete Wiener increments `dW` for `m` channels over a time grid.
///
/// Storage is step-major: `dw[n * m + j]` is the increment of channel `j`
/// over `[t_n, t_{n+1})`.  Each entry is Gaussian with mean zero and variance
/// `dt`, independent across channels and steps.
#[derive(Debug, Clone, PartialEq)]
pub struct NoisePath<T: Scalar> {
    m: usize,
    n_steps: usize,
    seed: Option<u64>,
    dw: Vec<T>,
}

/// Samples a Brownian increment path for `m` channels on `grid`.
///
/// The increments are derived cell-by-cell from `(seed, channel, step)` as
/// described in the module docs; the same arguments always reproduce the
/// same path bit for bit.
pub fn brownian_path<T: Scalar>(seed: u64, m: usize, grid: &TimeGrid<T>) -> NoisePath<T> {
    assert!(m >= 1, "a noise path needs at least one channel");
    let n_steps = grid.n_steps();
    let sqrt_dt = grid.dt().sqrt();
    let mut dw = Vec::with_capacity(m * n_steps);
    for step in 0..n_steps {
        for channel in 0..m {
            let mut rng = ChaCha8Rng::seed_from_u64(cell_state(seed, channel, step));
            let z: f64 = rng.sample(StandardNormal);
            dw.push(real::<T>(z) * sqrt_dt);
        }
    }
    NoisePath {
        m,
        n_steps,
        seed: Some(seed),
        dw,
    }
}

impl<T: Scalar> NoisePath<T> {
    /// The identically-zero path (used to switch noise off while keeping the
    /// stochastic solvers' code path unchanged).
    pub fn zeros(m: usize, n_steps: usize) -> Self {
        assert!(m >= 1, "a noise path needs at least one channel");
        Self {
            m,
            n_steps,
            seed: None,
            dw: vec![T::zero(); m * n_steps],
        }
    }

    /// Builds a path from explicit increments (step-major, length `m * n_steps`).
    pub fn from_increments(m: usize, n_steps: usize, dw: Vec<T>) -> Self {
        assert!(m >= 1, "a noise path needs at least one channel");
        assert_eq!(dw.len(), m * n_steps, "increment buffer has the wrong length");
        Self {
            m,
            n_steps,
            seed: None,
            dw,
        }
    }

    /// Number of channels.
    pub fn channels(&self) -> usize {
        self.m
    }

    /// Number of increments per channel.
    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    /// Seed the path was derived from, if it came from [`brownian_path`].
    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    /// The `m` channel increments over `[t_n, t_{n+1})`.
    pub fn increments(&self, n: usize) -> &[T] {
        &self.dw[n * self.m..(n + 1) * self.m]
    }

    /// All increments, step-major.
    pub fn raw(&self) -> &[T] {
        &self.dw
    }

    /// The same randomness scaled by `c` in every cell.
    pub fn scaled(&self, c: T) -> Self {
        Self {
            m: self.m,
            n_steps: self.n_steps,
            seed: self.seed,
            dw: self.dw.iter().map(|&x| x * c).collect(),
        }
    }

    /// Sums adjacent increments pairwise, producing the path this one refines
    /// dyadically.  Coupling a solve on `grid` with a solve on `grid.refined()`
    /// through `fine.coarsen()` keeps both runs on the same Brownian motion,
    /// which is what strong-convergence measurements require.
    pub fn coarsen(&self) -> Result<Self, DynamicsError> {
        if self.n_steps % 2 != 0 {
            return Err(DynamicsError::NoiseShape {
                expected_m: self.m,
                expected_steps: self.n_steps / 2 * 2,
                got_m: self.m,
                got_steps: self.n_steps,
            });
        }
        let half = self.n_steps / 2;
        let mut dw = Vec::with_capacity(self.m * half);
        for n in 0..half {
            for j in 0..self.m {
                dw.push(self.dw[2 * n * self.m + j] + self.dw[(2 * n + 1) * self.m + j]);
            }
        }
        Ok(Self {
            m: self.m,
            n_steps: half,
            seed: self.seed,
            dw,
        })
    }

    pub(crate) fn check_shape(
        &self,
        expected_m: usize,
        expected_steps: usize,
    ) -> Result<(), DynamicsError> {
        if self.m != expected_m || self.n_steps != expected_steps {
            return Err(DynamicsError::NoiseShape {
                expected_m,
                expected_steps,
                got_m: self.m,
                got_steps: self.n_steps,
            });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_reproduces_bitwise() {
        let tg = TimeGrid::<f64>::new(1.0, 64).unwrap();
        let a = brownian_path(42, 3, &tg);
        let b = brownian_path(42, 3, &tg);
        assert_eq!(a, b);
        let c = brownian_path(43, 3, &tg);
        assert_ne!(a.raw(), c.raw());
    }

    #[test]
    fn coarsen_sums_adjacent_pairs() {
        let tg = TimeGrid::<f64>::new(1.0, 8).unwrap();
        let fine = brownian_path(7, 2, &tg);
        let coarse = fine.coarsen().unwrap();
        assert_eq!(coarse.n_steps(), 4);
        for n in 0..4 {
            for j in 0..2 {
                let want = fine.increments(2 * n)[j] + fine.increments(2 * n + 1)[j];
                assert_eq!(coarse.increments(n)[j], want);
            }
        }
        // 4 -> 2 -> 1 steps; a one-step path cannot be coarsened further.
        assert!(coarse.coarsen().unwrap().coarsen().unwrap().coarsen().is_err());
    }

    #[test]
    fn sample_seeds_are_distinct() {
        let mut seen = std::collections::HashSet::new();
        for i in 0..1000 {
            assert!(seen.insert(sample_seed(123, i)));
        }
    }
}
