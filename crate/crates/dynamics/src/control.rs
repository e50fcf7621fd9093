//! Piecewise-constant deterministic controls acting through the noise shape.
//!
//! A control is the density `hdot` of an absolutely continuous path
//! `h(t) = integral of hdot`: one value per channel per time interval.  Its
//! energy is `E(h) = (1/2) sum_n |hdot_n|^2 dt`, and the admissible class at
//! level `N` consists of the controls with `2 E(h) <= N`.

use crate::time::TimeGrid;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use spectral_core::{real, Scalar};

/// A piecewise-constant control: `hdot[n * m + j]` is the value of channel
/// `j` on `[t_n, t_{n+1})` (step-major, like a noise path).
#[derive(Debug, Clone, PartialEq)]
pub struct Control<T: Scalar> {
    m: usize,
    n_steps: usize,
    hdot: Vec<T>,
}

impl<T: Scalar> Control<T> {
    /// The zero control.
    pub fn zeros(m: usize, n_steps: usize) -> Self {
        assert!(m >= 1, "a control needs at least one channel");
        Self {
            m,
            n_steps,
            hdot: vec![T::zero(); m * n_steps],
        }
    }

    /// A control that holds the same channel values on every interval.
    pub fn constant(values: &[T], n_steps: usize) -> Self {
        assert!(!values.is_empty(), "a control needs at least one channel");
        let m = values.len();
        let mut hdot = Vec::with_capacity(m * n_steps);
        for _ in 0..n_steps {
            hdot.extend_from_slice(values);
        }
        Self { m, n_steps, hdot }
    }

    /// Builds a control from explicit values (step-major, length `m * n_steps`).
    pub fn from_values(m: usize, n_steps: usize, hdot: Vec<T>) -> Self {
        assert!(m >= 1, "a control needs at least one channel");
        assert_eq!(hdot.len(), m * n_steps, "control buffer has the wrong length");
        Self { m, n_steps, hdot }
    }

    /// A smooth pseudo-random control rescaled so that
    /// `integral |hdot|^2 dt = action`, i.e. energy `action / 2`.
    ///
    /// Each channel is a three-term sine series in time with coefficients
    /// drawn reproducibly from `seed`; the series vanishes at both endpoints,
    /// so the control is far from the rough paths the solvers must also
    /// accept, and its energy is set exactly by one global rescaling.
    pub fn smooth_random(seed: u64, m: usize, grid: &TimeGrid<T>, action: T) -> Self {
        assert!(m >= 1, "a control needs at least one channel");
        assert!(action >= T::zero(), "requested action must be non-negative");
        let n_steps = grid.n_steps();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut amps = vec![T::zero(); m * 3];
        for a in amps.iter_mut() {
            let z: f64 = rng.sample(StandardNormal);
            *a = real::<T>(z);
        }
        let horizon = grid.horizon();
        let mut hdot = Vec::with_capacity(m * n_steps);
        for n in 0..n_steps {
            let t_mid = grid.node_time(n) + grid.dt() / real::<T>(2.0);
            for j in 0..m {
                let mut v = T::zero();
                for p in 0..3 {
                    let phase = T::PI() * real::<T>((p + 1) as f64) * t_mid / horizon;
                    v += amps[j * 3 + p] * phase.sin();
                }
                hdot.push(v);
            }
        }
        let mut ctrl = Self { m, n_steps, hdot };
        let raw = ctrl.energy(grid) * real::<T>(2.0);
        if raw > T::zero() {
            ctrl = ctrl.scaled((action / raw).sqrt());
        }
        ctrl
    }

    /// Number of channels.
    pub fn channels(&self) -> usize {
        self.m
    }

    /// Number of time intervals.
    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    /// Channel values on `[t_n, t_{n+1})`.
    pub fn values(&self, n: usize) -> &[T] {
        &self.hdot[n * self.m..(n + 1) * self.m]
    }

    /// All values, step-major.
    pub fn raw(&self) -> &[T] {
        &self.hdot
    }

    /// Energy `E(h) = (1/2) sum_n |hdot_n|^2 dt`.
    pub fn energy(&self, grid: &TimeGrid<T>) -> T {
        let sum: T = self.hdot.iter().map(|&x| x * x).sum();
        sum * grid.dt() / real::<T>(2.0)
    }

    /// Whether the control lies in the level-`N` admissible class,
    /// i.e. `2 E(h) <= N`.
    pub fn in_level_set(&self, level: T, grid: &TimeGrid<T>) -> bool {
        self.energy(grid) * real::<T>(2.0) <= level
    }

    /// The control scaled by `c` in every cell (energy scales by `c^2`).
    pub fn scaled(&self, c: T) -> Self {
        Self {
            m: self.m,
            n_steps: self.n_steps,
            hdot: self.hdot.iter().map(|&x| x * c).collect(),
        }
    }

    /// Adds `c` times another control in place.  Panics if shapes differ.
    pub fn add_scaled(&mut self, c: T, other: &Self) {
        assert_eq!(self.m, other.m, "channel count mismatch");
        assert_eq!(self.n_steps, other.n_steps, "step count mismatch");
        for (a, &b) in self.hdot.iter_mut().zip(other.hdot.iter()) {
            *a += c * b;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_control_energy() {
        let tg = TimeGrid::<f64>::new(2.0, 100).unwrap();
        // |hdot|^2 = 0.3^2 + 0.4^2 = 0.25 on every interval, so
        // E = 0.5 * 0.25 * 2.0 = 0.25 and 2E = 0.5.
        let c = Control::constant(&[0.3, 0.4], 100);
        assert!((c.energy(&tg) - 0.25).abs() < 1e-14);
        assert!(c.in_level_set(0.5, &tg));
        assert!(!c.in_level_set(0.49, &tg));
    }

    #[test]
    fn smooth_random_hits_requested_action() {
        let tg = TimeGrid::<f64>::new(0.5, 200).unwrap();
        let c = Control::smooth_random(9, 2, &tg, 3.5);
        assert!((2.0 * c.energy(&tg) - 3.5).abs() < 1e-12);
        let d = Control::smooth_random(9, 2, &tg, 3.5);
        assert_eq!(c, d);
    }

    #[test]
    fn scaling_scales_energy_quadratically() {
        let tg = TimeGrid::<f64>::new(1.0, 50).unwrap();
        let c = Control::smooth_random(1, 3, &tg, 1.0);
        let e = c.energy(&tg);
        assert!((c.scaled(2.0).energy(&tg) - 4.0 * e).abs() < 1e-13);
        let mut sum = c.clone();
        sum.add_scaled(-1.0, &c);
        assert!(sum.energy(&tg) == 0.0);
    }
}
