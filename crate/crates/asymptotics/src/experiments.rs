//! Prepackaged asymptotic experiments: scaling of the primal gap, the
//! central-limit correction, the moderate-deviation continuity check, and
//! the uniform moment audit for controlled deviations.

use crate::ensemble::{Ensemble, MomentRow, MomentTable, Quantity};
use crate::error::AsymptoticsError;
use crate::stats::{fit_power_law, SlopeFit};
use dynamics::Control;
use spectral_core::{real, Scalar};

/// The moderate-deviation speed `lambda(eps) = eps^(-gamma)`.
pub fn lambda_schedule<T: Scalar>(gamma: T, eps: T) -> T {
    eps.powf(-gamma)
}

fn check_gamma<T: Scalar>(gamma: T) -> Result<(), AsymptoticsError> {
    if !(gamma > T::zero()) || !(gamma < real::<T>(0.5)) {
        return Err(AsymptoticsError::InvalidSpec(format!(
            "the deviation exponent must lie in (0, 1/2), got {gamma}"
        )));
    }
    Ok(())
}

fn check_level<T: Scalar>(
    control: &Control<T>,
    tg: &dynamics::TimeGrid<T>,
    level: T,
) -> Result<(), AsymptoticsError> {
    if !control.in_level_set(level, tg) {
        return Err(AsymptoticsError::ControlOutsideLevel {
            two_energy: (real::<T>(2.0) * control.energy(tg)).to_f64().unwrap_or(f64::NAN),
            level: level.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(())
}

/// A fitted scaling law together with the table it came from.
#[derive(Debug, Clone)]
pub struct ScalingReport<T: Scalar> {
    pub table: MomentTable<T>,
    pub fit: SlopeFit<T>,
    /// Whether the fitted means decrease strictly along decreasing `eps`.
    pub strictly_decreasing: bool,
}

fn strictly_decreasing<T: Scalar>(rows: &[MomentRow<T>]) -> bool {
    rows.windows(2).all(|w| w[1].mean < w[0].mean)
}

/// Fit `log mean` against `log eps` for the rows of `table` at order `p`.
pub fn fit_scaling_slope<T: Scalar>(
    table: &MomentTable<T>,
    p: T,
) -> Result<SlopeFit<T>, AsymptoticsError> {
    fit_power_law(&table.points_at_order(p))
}

/// Sweep `quantity` over `epsilons` at the given moment orders and fit the
/// scaling exponent of the first order.  Seeds are reused across the sweep,
/// so the trend rides on common sample paths.
pub fn scaling_experiment<T: Scalar>(
    ens: &Ensemble<'_, T>,
    quantity: &Quantity<T>,
    epsilons: &[T],
    orders: &[T],
) -> Result<ScalingReport<T>, AsymptoticsError> {
    if orders.is_empty() {
        return Err(AsymptoticsError::InvalidSpec(
            "at least one moment order is required".into(),
        ));
    }
    let mut rows = Vec::with_capacity(epsilons.len() * orders.len());
    for &eps in epsilons {
        rows.extend(ens.estimate_sup_moment(quantity, eps, orders)?);
    }
    let table = MomentTable {
        quantity: quantity.label(),
        rows,
    };
    let fit = fit_scaling_slope(&table, orders[0])?;
    let first_order: Vec<MomentRow<T>> = table
        .rows
        .iter()
        .filter(|r| r.p == orders[0])
        .copied()
        .collect();
    Ok(ScalingReport {
        strictly_decreasing: strictly_decreasing(&first_order),
        table,
        fit,
    })
}

/// Scaling of the primal gap `E[sup |u^eps - u⁰|_V^p] ~ eps^(p/2)`.
pub fn primal_gap_experiment<T: Scalar>(
    ens: &Ensemble<'_, T>,
    epsilons: &[T],
    orders: &[T],
) -> Result<ScalingReport<T>, AsymptoticsError> {
    scaling_experiment(ens, &Quantity::PrimalGap, epsilons, orders)
}

/// Convergence of the centered fluctuation to its Gaussian limit:
/// `E[sup |(u^eps - u⁰)/sqrt(eps) - V⁰|_V^p] -> 0`.
pub fn clt_limit_experiment<T: Scalar>(
    ens: &Ensemble<'_, T>,
    epsilons: &[T],
    orders: &[T],
) -> Result<ScalingReport<T>, AsymptoticsError> {
    scaling_experiment(ens, &Quantity::CltDeviation, epsilons, orders)
}

/// One row of the continuity check: the mean sup-distance between the
/// controlled deviation at `epsilon` and the frozen skeleton image.
#[derive(Debug, Clone, Copy)]
pub struct DistanceRow<T: Scalar> {
    pub epsilon: T,
    pub lambda: T,
    pub n: usize,
    pub mean: T,
    pub stderr: T,
}

/// Outcome of the continuity check for controlled deviations.
#[derive(Debug, Clone)]
pub struct ConditionAReport<T: Scalar> {
    pub rows: Vec<DistanceRow<T>>,
    pub strictly_decreasing: bool,
    /// Last mean over first mean; small values certify decay.
    pub final_over_initial: T,
}

/// Continuity of the controlled deviation in the control and the intensity:
/// drive `X^{h^eps}` with `h^eps = h + eps^(1/4) g`, noise at speed
/// `lambda = eps^(-gamma)`, and measure the mean sup-distance to the
/// skeleton image of the limiting control `h`.  Both `h` and every `h^eps`
/// must stay inside the level set `{2 E(h) <= level}`.
pub fn mdp_condition_a_experiment<T: Scalar>(
    ens: &Ensemble<'_, T>,
    h: &Control<T>,
    g: &Control<T>,
    gamma: T,
    level: T,
    epsilons: &[T],
) -> Result<ConditionAReport<T>, AsymptoticsError> {
    check_gamma(gamma)?;
    check_level(h, ens.tg, level)?;
    if epsilons.is_empty() {
        return Err(AsymptoticsError::InvalidSpec(
            "at least one intensity is required".into(),
        ));
    }
    let mut rows = Vec::with_capacity(epsilons.len());
    for &eps in epsilons {
        let lambda = lambda_schedule(gamma, eps);
        let mut perturbed = h.clone();
        perturbed.add_scaled(eps.powf(real::<T>(0.25)), g);
        check_level(&perturbed, ens.tg, level)?;
        let quantity = Quantity::ControlledGap {
            lambda,
            control: perturbed,
            reference_control: h.clone(),
        };
        let sups = ens.sample_sups(&quantity, eps)?;
        let (mean, stderr) = crate::stats::batch_means(&sups, crate::ensemble::ERROR_BATCHES);
        rows.push(DistanceRow {
            epsilon: eps,
            lambda,
            n: ens.n_samples,
            mean,
            stderr,
        });
    }
    let decreasing = rows.windows(2).all(|w| w[1].mean < w[0].mean);
    let final_over_initial = rows.last().unwrap().mean / rows.first().unwrap().mean;
    Ok(ConditionAReport {
        rows,
        strictly_decreasing: decreasing,
        final_over_initial,
    })
}

/// One row of the uniform moment audit.
#[derive(Debug, Clone, Copy)]
pub struct AuditRow<T: Scalar> {
    pub epsilon: T,
    pub lambda: T,
    pub n: usize,
    pub mean: T,
    pub stderr: T,
}

/// Outcome of the uniform moment audit.
#[derive(Debug, Clone)]
pub struct AuditReport<T: Scalar> {
    pub rows: Vec<AuditRow<T>>,
    /// Largest row mean across the sweep.
    pub max_mean: T,
    /// Mean at the largest intensity over mean at the smallest.
    pub ratio_extremes: T,
    /// Whether `ratio_extremes` stays within a fixed comparability band.
    pub pass: bool,
}

/// Band within which the extreme-intensity means must agree for the audit
/// to pass: the ratio must land in `[1/AUDIT_BAND, AUDIT_BAND]`.
pub const AUDIT_BAND: f64 = 3.0;

/// Uniform-in-`eps` moment audit for the controlled deviation: sweep the
/// intensity, drive `X^{h^eps}` with `h^eps = h + eps^(1/4) g` per sample,
/// and compare the mean of `sup_t |X|_W^p` across the extremes of the
/// sweep.  A bounded ratio is the numerical signature of moment bounds
/// that hold uniformly in the intensity.
pub fn uniform_bound_audit<T: Scalar>(
    ens: &Ensemble<'_, T>,
    control: &Control<T>,
    perturbation: &Control<T>,
    gamma: T,
    level: T,
    epsilons: &[T],
    p: T,
) -> Result<AuditReport<T>, AsymptoticsError> {
    check_gamma(gamma)?;
    check_level(control, ens.tg, level)?;
    if epsilons.len() < 2 {
        return Err(AsymptoticsError::InvalidSpec(
            "the audit needs at least two intensities".into(),
        ));
    }
    if !(p >= real::<T>(2.0)) {
        return Err(AsymptoticsError::InvalidSpec(format!(
            "moment order must be at least 2, got {p}"
        )));
    }
    let mut rows = Vec::with_capacity(epsilons.len());
    for &eps in epsilons {
        if !(eps > T::zero()) || !(eps < T::one()) {
            return Err(AsymptoticsError::InvalidSpec(format!(
                "epsilon must lie in (0, 1), got {eps}"
            )));
        }
        let lambda = lambda_schedule(gamma, eps);
        let mut driven = control.clone();
        driven.add_scaled(eps.powf(real::<T>(0.25)), perturbation);
        check_level(&driven, ens.tg, level)?;
        let sups: Vec<T> = {
            use dynamics::{brownian_path, sample_seed, solve_controlled_mdp, RecordPolicy};
            use rayon::prelude::*;
            (0..ens.n_samples)
                .into_par_iter()
                .map(|i| {
                    let seed = sample_seed(ens.root_seed, i as u64);
                    let noise = brownian_path(seed, ens.coeffs.channels(), ens.tg);
                    solve_controlled_mdp(
                        ens.grid,
                        ens.coeffs,
                        ens.tg,
                        ens.base,
                        eps,
                        lambda,
                        &driven,
                        &noise,
                        RecordPolicy::NormsOnly,
                    )
                    .map(|traj| traj.sup_norm_w())
                    .map_err(|source| AsymptoticsError::Sample { index: i, source })
                })
                .collect::<Result<Vec<T>, AsymptoticsError>>()?
        };
        let powered: Vec<T> = sups.iter().map(|&s| s.powf(p)).collect();
        let (mean, stderr) = crate::stats::batch_means(&powered, crate::ensemble::ERROR_BATCHES);
        rows.push(AuditRow {
            epsilon: eps,
            lambda,
            n: ens.n_samples,
            mean,
            stderr,
        });
    }
    let max_mean = rows
        .iter()
        .map(|r| r.mean)
        .fold(T::zero(), |a, b| a.max(b));
    let ratio_extremes = rows.first().unwrap().mean / rows.last().unwrap().mean;
    let band = real::<T>(AUDIT_BAND);
    let pass = ratio_extremes >= T::one() / band && ratio_extremes <= band;
    Ok(AuditReport {
        rows,
        max_mean,
        ratio_extremes,
        pass,
    })
}
