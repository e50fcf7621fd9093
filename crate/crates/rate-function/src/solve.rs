//! Minimum-energy control by conjugate gradients on the normal equations.
//!
//! The variational rate of a terminal state `x_T` is
//! `inf {½ Σ_n dt |hdot_n|² : L h = x_T}`.  The minimizer lies in the row
//! space of `L`, i.e. `hdot = Lᵀ y` for some terminal-state multiplier `y`,
//! and plugging in turns the constraint into the normal equations
//! `L Lᵀ y = x_T`.  `L Lᵀ` is symmetric positive semidefinite in the V inner
//! product, so matrix-free conjugate gradients applies, each iteration one
//! forward plus one adjoint sweep.  When `x_T` has a component outside the
//! range of `L` no control reaches it and the infimum over the empty set is
//! `+∞`; numerically this surfaces as CG stagnation, reported through the
//! `reachable` flag.

use crate::error::RateError;
use crate::map::SkeletonMap;
use crate::target::TargetSpec;
use dynamics::Control;
use spectral_core::{Scalar, SpectralField};

/// Outcome of the minimum-energy problem.
#[derive(Debug, Clone)]
pub struct RateResult<T: Scalar> {
    /// The rate value `½ Σ_n dt |hdot_n|²` of the returned control, or `+∞`
    /// when the target is judged unreachable.
    pub value: T,
    /// Best control found (the minimizer on success).
    pub control: Control<T>,
    /// Final absolute misfit `‖L h − x_T‖_V`.
    pub residual: T,
    /// Conjugate-gradient iterations spent.
    pub iterations: usize,
    /// Whether the solve met the requested relative residual.
    pub reachable: bool,
}

impl<'a, T: Scalar> SkeletonMap<'a, T> {
    /// Solve `min ½ Σ_n dt |hdot_n|²` subject to `(L h)(T) = x_T` by
    /// conjugate gradients on `L Lᵀ y = x_T`, returning `hdot = Lᵀ y`.
    ///
    /// Success means the relative residual dropped below `tol`; the returned
    /// control then has minimal energy among all controls with that misfit,
    /// up to the CG tolerance.  On stagnation or iteration exhaustion the
    /// result carries the best control found, `value = +∞`, and
    /// `reachable = false` — the discrete form of the `inf ∅ = +∞`
    /// convention.
    pub fn min_norm_control(
        &self,
        target: &TargetSpec<T>,
        tol: T,
        max_iter: usize,
    ) -> Result<RateResult<T>, RateError> {
        let x_t = match target {
            TargetSpec::Terminal(x) => x,
            TargetSpec::Trajectory(_) => {
                return Err(RateError::InvalidSpec(
                    "minimum-energy solves take terminal targets; trajectory targets only \
                     support misfit gradients"
                        .into(),
                ))
            }
        };
        target.validate(self.grid(), self.time_grid())?;
        if !(tol > T::zero()) {
            return Err(RateError::InvalidSpec(format!(
                "tolerance must be positive, got {tol}"
            )));
        }

        let grid = self.grid();
        let norm_b = grid.norm_v(x_t);
        let zero_control = Control::zeros(self.channels(), self.time_grid().n_steps());
        if norm_b == T::zero() {
            return Ok(RateResult {
                value: T::zero(),
                control: zero_control,
                residual: T::zero(),
                iterations: 0,
                reachable: true,
            });
        }
        let threshold = tol * norm_b;

        let apply = |y: &SpectralField<T>| -> Result<SpectralField<T>, RateError> {
            self.forward_terminal(&self.adjoint_terminal(y))
        };

        let mut y = grid.zero_field();
        let mut iterations = 0usize;

        // Outer restart: recompute the true residual b − K y; at most a few
        // rounds, guarding against drift of the recursive CG residual.
        'outer: while iterations < max_iter {
            let mut r = x_t.clone();
            if iterations > 0 {
                r.axpy(-T::one(), &apply(&y)?);
            }
            let mut rs = grid.inner_v(&r, &r);
            if rs.sqrt() <= threshold {
                break;
            }
            let mut d = r.clone();
            while iterations < max_iter {
                let kd = apply(&d)?;
                let dkd = grid.inner_v(&d, &kd);
                iterations += 1;
                // Curvature at roundoff level: the Krylov space is exhausted,
                // the remaining residual is (numerically) out of range.
                if !(dkd > T::epsilon() * rs) {
                    break 'outer;
                }
                let alpha = rs / dkd;
                y.axpy(alpha, &d);
                r.axpy(-alpha, &kd);
                let rs_next = grid.inner_v(&r, &r);
                if rs_next.sqrt() <= threshold {
                    continue 'outer;
                }
                let beta = rs_next / rs;
                rs = rs_next;
                let mut d_next = r.clone();
                d_next.axpy(beta, &d);
                d = d_next;
            }
        }

        let control = self.adjoint_terminal(&y);
        let mut misfit = self.forward_terminal(&control)?;
        misfit.axpy(-T::one(), x_t);
        let residual = grid.norm_v(&misfit);
        let reachable = residual <= threshold;
        let value = if reachable {
            control.energy(self.time_grid())
        } else {
            T::infinity()
        };
        Ok(RateResult {
            value,
            control,
            residual,
            iterations,
            reachable,
        })
    }

    /// The rate value alone: energy of the minimum-energy control, or `+∞`
    /// for unreachable targets.
    pub fn rate_value(&self, target: &TargetSpec<T>, tol: T) -> Result<T, RateError> {
        Ok(self.min_norm_control(target, tol, DEFAULT_MAX_ITER)?.value)
    }
}

/// Default iteration budget; past this the target is declared unreachable.
pub const DEFAULT_MAX_ITER: usize = 500;
