//! The Monte Carlo engine: independent samples in parallel, reductions in
//! sample order, moments of pathwise sup-norms of the coupled quantities.

use crate::error::AsymptoticsError;
use crate::stats::batch_means;
use coefficients::CoefficientSet;
use dynamics::{
    brownian_path, sample_seed, solve_skeleton, solve_z_eps, CltStepper, Control,
    DeviationStepper, FrozenBase, RecordPolicy, SpdeStepper, Stepper, TimeGrid, Trajectory,
};
use rayon::prelude::*;
use spectral_core::{real, Scalar, SpectralGrid};

/// Number of contiguous blocks used for batch-means error bars.
pub const ERROR_BATCHES: usize = 10;

/// Which coupled pathwise quantity an ensemble measures the sup-norm of.
#[derive(Debug, Clone)]
pub enum Quantity<T: Scalar> {
    /// `u^eps - u⁰`: the primal solution against the frozen deterministic
    /// limit, coupled through the shared base.
    PrimalGap,
    /// `(u^eps - u⁰)/sqrt(eps) - V⁰`: the centered fluctuation against its
    /// Gaussian limit, both driven by the same noise path.
    CltDeviation,
    /// `Z^eps`: the moderate-deviation rescaled deviation itself.
    Deviation { lambda: T },
    /// `X^{h} - Γ⁰(h_ref)`: the controlled deviation against the skeleton
    /// image of a reference control.
    ControlledGap {
        lambda: T,
        control: Control<T>,
        reference_control: Control<T>,
    },
}

impl<T: Scalar> Quantity<T> {
    /// Stable lowercase label used in file output.
    pub fn label(&self) -> &'static str {
        match self {
            Quantity::PrimalGap => "primal-gap",
            Quantity::CltDeviation => "clt-deviation",
            Quantity::Deviation { .. } => "deviation",
            Quantity::ControlledGap { .. } => "controlled-gap",
        }
    }
}

/// One row of a moment table: the ensemble estimate of
/// `E[sup_t |quantity|_V^p]` at one `(epsilon, p)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentRow<T: Scalar> {
    pub epsilon: T,
    pub p: T,
    pub n: usize,
    pub mean: T,
    pub stderr: T,
}

/// A labelled collection of moment rows.
#[derive(Debug, Clone)]
pub struct MomentTable<T: Scalar> {
    pub quantity: &'static str,
    pub rows: Vec<MomentRow<T>>,
}

impl<T: Scalar> MomentTable<T> {
    /// The `(epsilon, mean)` points of all rows at moment order `p`,
    /// in the order they were recorded.
    pub fn points_at_order(&self, p: T) -> Vec<(T, T)> {
        self.rows
            .iter()
            .filter(|r| r.p == p)
            .map(|r| (r.epsilon, r.mean))
            .collect()
    }
}

/// Shared context of one Monte Carlo ensemble: the discretization, the
/// coefficient maps, the frozen base trajectory, the sample count and the
/// root seed.  Sample `i` always draws its path from
/// `sample_seed(root_seed, i)`, so a table is reproducible bit for bit from
/// the spec alone, for any worker count.
pub struct Ensemble<'a, T: Scalar> {
    pub grid: &'a SpectralGrid<T>,
    pub coeffs: &'a CoefficientSet<T>,
    pub tg: &'a TimeGrid<T>,
    pub base: &'a FrozenBase<T>,
    pub n_samples: usize,
    pub root_seed: u64,
}

impl<'a, T: Scalar> Ensemble<'a, T> {
    pub fn new(
        grid: &'a SpectralGrid<T>,
        coeffs: &'a CoefficientSet<T>,
        tg: &'a TimeGrid<T>,
        base: &'a FrozenBase<T>,
        n_samples: usize,
        root_seed: u64,
    ) -> Result<Self, AsymptoticsError> {
        if n_samples < 2 {
            return Err(AsymptoticsError::InvalidSpec(format!(
                "need at least 2 samples, got {n_samples}"
            )));
        }
        if base.n_nodes() < tg.n_nodes() {
            return Err(AsymptoticsError::InvalidSpec(format!(
                "base trajectory has {} nodes but the time grid needs {}",
                base.n_nodes(),
                tg.n_nodes()
            )));
        }
        Ok(Self {
            grid,
            coeffs,
            tg,
            base,
            n_samples,
            root_seed,
        })
    }

    fn check_epsilon(&self, eps: T, allow_zero: bool) -> Result<(), AsymptoticsError> {
        let lo_ok = if allow_zero { eps >= T::zero() } else { eps > T::zero() };
        if !lo_ok || !(eps < T::one()) || !eps.is_finite() {
            return Err(AsymptoticsError::InvalidSpec(format!(
                "epsilon must lie in {}, got {eps}",
                if allow_zero { "[0, 1)" } else { "(0, 1)" }
            )));
        }
        Ok(())
    }

    fn sup_primal_gap(&self, eps: T, seed: u64) -> Result<T, dynamics::DynamicsError> {
        let noise = brownian_path(seed, self.coeffs.channels(), self.tg);
        let mut primal = SpdeStepper::new(
            self.grid,
            self.coeffs,
            *self.tg,
            self.base.field(0).clone(),
            eps,
            &noise,
        )?;
        let mut sup = T::zero();
        for n in 1..=self.tg.n_steps() {
            primal.step()?;
            let mut d = primal.state().clone();
            d.axpy(-T::one(), self.base.field(n));
            sup = sup.max(self.grid.norm_v(&d));
        }
        Ok(sup)
    }

    fn sup_clt_deviation(&self, eps: T, seed: u64) -> Result<T, dynamics::DynamicsError> {
        let noise = brownian_path(seed, self.coeffs.channels(), self.tg);
        let mut primal = SpdeStepper::new(
            self.grid,
            self.coeffs,
            *self.tg,
            self.base.field(0).clone(),
            eps,
            &noise,
        )?;
        let mut fluct = CltStepper::new(self.grid, self.coeffs, *self.tg, self.base, &noise)?;
        let inv_sqrt_eps = T::one() / eps.sqrt();
        let mut sup = T::zero();
        for n in 1..=self.tg.n_steps() {
            primal.step()?;
            fluct.step()?;
            let mut d = primal.state().clone();
            d.axpy(-T::one(), self.base.field(n));
            d.scale(inv_sqrt_eps);
            d.axpy(-T::one(), fluct.state());
            sup = sup.max(self.grid.norm_v(&d));
        }
        Ok(sup)
    }

    fn sup_deviation(&self, eps: T, lambda: T, seed: u64) -> Result<T, dynamics::DynamicsError> {
        let noise = brownian_path(seed, self.coeffs.channels(), self.tg);
        let traj = solve_z_eps(
            self.grid,
            self.coeffs,
            self.tg,
            self.base,
            eps,
            lambda,
            &noise,
            RecordPolicy::NormsOnly,
        )?;
        Ok(traj.sup_norm_v())
    }

    fn sup_controlled_gap(
        &self,
        eps: T,
        lambda: T,
        control: &Control<T>,
        reference: &Trajectory<T>,
        seed: u64,
    ) -> Result<T, dynamics::DynamicsError> {
        let noise = brownian_path(seed, self.coeffs.channels(), self.tg);
        let mut dev = DeviationStepper::new(
            self.grid,
            self.coeffs,
            *self.tg,
            self.base,
            eps,
            lambda,
            Some(control),
            &noise,
        )?;
        let mut sup = T::zero();
        for n in 1..=self.tg.n_steps() {
            dev.step()?;
            let mut d = dev.state().clone();
            d.axpy(-T::one(), reference.field_at(n).expect("reference is fully recorded"));
            sup = sup.max(self.grid.norm_v(&d));
        }
        Ok(sup)
    }

    /// Per-sample pathwise sup-norms of `quantity` at intensity `eps`,
    /// ordered by sample index.
    pub fn sample_sups(
        &self,
        quantity: &Quantity<T>,
        eps: T,
    ) -> Result<Vec<T>, AsymptoticsError> {
        // Only the plain gap survives eps = 0 (it degenerates to an exact
        // replay of the base); the other quantities divide by a power of eps.
        self.check_epsilon(eps, matches!(quantity, Quantity::PrimalGap))?;
        let reference = match quantity {
            Quantity::ControlledGap {
                reference_control, ..
            } => Some(solve_skeleton(
                self.grid,
                self.coeffs,
                self.tg,
                self.base,
                reference_control,
                RecordPolicy::EveryNode,
            )?),
            _ => None,
        };

        (0..self.n_samples)
            .into_par_iter()
            .map(|i| {
                let seed = sample_seed(self.root_seed, i as u64);
                let sup = match quantity {
                    Quantity::PrimalGap => self.sup_primal_gap(eps, seed),
                    Quantity::CltDeviation => self.sup_clt_deviation(eps, seed),
                    Quantity::Deviation { lambda } => self.sup_deviation(eps, *lambda, seed),
                    Quantity::ControlledGap {
                        lambda, control, ..
                    } => self.sup_controlled_gap(
                        eps,
                        *lambda,
                        control,
                        reference.as_ref().expect("reference computed above"),
                        seed,
                    ),
                };
                sup.map_err(|source| AsymptoticsError::Sample { index: i, source })
            })
            .collect()
    }

    /// Ensemble rows `E[sup_t |quantity|_V^p]` for every requested order,
    /// with batch-means error bars, all from one set of sample paths.
    pub fn estimate_sup_moment(
        &self,
        quantity: &Quantity<T>,
        eps: T,
        orders: &[T],
    ) -> Result<Vec<MomentRow<T>>, AsymptoticsError> {
        for &p in orders {
            if !(p >= real::<T>(2.0)) {
                return Err(AsymptoticsError::InvalidSpec(format!(
                    "moment order must be at least 2, got {p}"
                )));
            }
        }
        let sups = self.sample_sups(quantity, eps)?;
        Ok(orders
            .iter()
            .map(|&p| {
                let powered: Vec<T> = sups.iter().map(|&s| s.powf(p)).collect();
                let (mean, stderr) = batch_means(&powered, ERROR_BATCHES);
                MomentRow {
                    epsilon: eps,
                    p,
                    n: self.n_samples,
                    mean,
                    stderr,
                }
            })
            .collect())
    }
}
