//! Monte Carlo asymptotics for the stochastic second grade fluid on the
//! torus: small-noise scaling of the primal gap, convergence of centered
//! fluctuations to their Gaussian limit, and continuity plus uniform moment
//! audits for moderate-deviation rescalings.
//!
//! # What this crate measures
//!
//! All experiments ride on the same pattern.  A frozen deterministic base
//! trajectory `u⁰` is computed once and shared read-only across samples.
//! An [`Ensemble`] then draws independent noise paths — sample `i` always
//! uses `sample_seed(root_seed, i)`, so results are reproducible bit for bit
//! regardless of how rayon schedules the work — and evaluates a pathwise
//! sup-norm of a coupled [`Quantity`]:
//!
//! * `PrimalGap`: `sup_t |u^eps(t) - u⁰(t)|_V`, which scales like
//!   `sqrt(eps)`;
//! * `CltDeviation`: `sup_t |(u^eps - u⁰)/sqrt(eps) - V⁰|_V`, which
//!   vanishes as `eps -> 0` because the centered fluctuation converges to
//!   the Gaussian limit `V⁰`;
//! * `Deviation`: `sup_t |Z^eps|_V` at the moderate speed `lambda`;
//! * `ControlledGap`: `sup_t |X^{h^eps} - Γ⁰(h)|_V`, the distance between a
//!   controlled deviation and the skeleton image of a limiting control.
//!
//! Coupling matters: each sample drives every equation in the pair with the
//! *same* Brownian path, so the measured quantity is the discrete analogue
//! of the pathwise differences the limit theorems speak about.
//!
//! # Reductions
//!
//! Per-sample sups are raised to the requested moment orders and averaged;
//! error bars come from batch means over contiguous sample blocks.  Scaling
//! exponents are fitted by least squares in log-log coordinates
//! ([`fit_power_law`], [`fit_scaling_slope`]), and the fit refuses sweeps
//! that span less than two decades of `eps` — a slope read off a narrow
//! sweep is noise, not evidence.
//!
//! # Experiments
//!
//! * [`primal_gap_experiment`] / [`clt_limit_experiment`]: moment sweeps
//!   with fitted scaling slopes ([`ScalingReport`]).
//! * [`mdp_condition_a_experiment`]: drives `X^{h^eps}` with perturbed
//!   controls `h^eps = h + eps^(1/4) g` at speed `lambda = eps^(-gamma)`
//!   and checks that the mean sup-distance to the frozen skeleton image
//!   `Γ⁰(h)` decays — the numerical form of the continuity condition under
//!   which moderate deviation principles follow from the weak convergence
//!   method.  Controls are gated to the level set `{2 E(h) <= level}`.
//! * [`uniform_bound_audit`]: sweeps the intensity and checks that
//!   `E[sup_t |X^{h,eps}|_W^p]` stays within a fixed comparability band
//!   across the extremes — the numerical signature of moment bounds that
//!   hold uniformly in `eps`.

mod ensemble;
mod error;
mod experiments;
mod stats;

pub use ensemble::{Ensemble, MomentRow, MomentTable, Quantity, ERROR_BATCHES};
pub use error::AsymptoticsError;
pub use experiments::{
    clt_limit_experiment, fit_scaling_slope, lambda_schedule, mdp_condition_a_experiment,
    primal_gap_experiment, scaling_experiment, uniform_bound_audit, AuditReport, AuditRow,
    ConditionAReport, DistanceRow, ScalingReport, AUDIT_BAND,
};
pub use stats::{batch_means, fit_power_law, SlopeFit};

/// Crate version, recorded in output manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
