//! The discrete skeleton solution map and its exact transpose.
//!
//! Because trajectories start from zero and the base is frozen, the one-step
//! recursion `X ↦ E[(I + dt A_n)X + dt C_n hdot_n]` makes the control-to-state
//! map `L: h ↦ X` *linear*.  This module exposes `L` (by reusing the skeleton
//! stepper) together with its adjoint, computed by one backward sweep that
//! transposes each factor of the same recursion — the semigroup multiplier is
//! diagonal and real (hence V-self-adjoint), the linearized transport
//! transposes via [`linearized_b_sum_adjoint`], the forcing derivative via its
//! declared V-adjoint, and the channel map via V-projections onto the lifted
//! channel shapes.  Transposing the *discrete* scheme rather than
//! discretizing the continuous adjoint is what makes gradient checks exact.

use crate::error::RateError;
use crate::target::{trapezoid_weights, TargetSpec};
use coefficients::{hat_lift, CoefficientSet};
use dynamics::{
    semigroup_factor, solve_skeleton, Control, FrozenBase, RecordPolicy, SkeletonStepper, Stepper,
    TimeGrid,
};
use spectral_core::{linearized_b_sum_adjoint, real, Scalar, SpectralField, SpectralGrid};

/// Discrete inner product on control space, `Σ_n dt ⟨a_n, b_n⟩` — the
/// quadrature form of the L²([0,T]; R^m) pairing.  Twice a control's energy
/// equals `control_inner(tg, h, h)`.
pub fn control_inner<T: Scalar>(tg: &TimeGrid<T>, a: &Control<T>, b: &Control<T>) -> T {
    assert_eq!(a.channels(), b.channels(), "channel count mismatch");
    assert_eq!(a.n_steps(), b.n_steps(), "step count mismatch");
    let dot: T = a
        .raw()
        .iter()
        .zip(b.raw())
        .fold(T::zero(), |acc, (&x, &y)| acc + x * y);
    dot * tg.dt()
}

/// Misfit value and its gradient in control space, in the
/// [`control_inner`] pairing: `J(h + k) ≈ value + control_inner(gradient, k)`.
#[derive(Debug, Clone)]
pub struct GradientReport<T: Scalar> {
    pub value: T,
    pub gradient: Control<T>,
}

/// The solution map of the controlled limit equation for one frozen base
/// trajectory, with forward and transposed sweeps.
pub struct SkeletonMap<'a, T: Scalar> {
    grid: &'a SpectralGrid<T>,
    coeffs: &'a CoefficientSet<T>,
    tg: TimeGrid<T>,
    base: &'a FrozenBase<T>,
    semigroup: Vec<T>,
}

impl<'a, T: Scalar> SkeletonMap<'a, T> {
    pub fn new(
        grid: &'a SpectralGrid<T>,
        coeffs: &'a CoefficientSet<T>,
        tg: TimeGrid<T>,
        base: &'a FrozenBase<T>,
    ) -> Result<Self, RateError> {
        if base.n_nodes() < tg.n_nodes() {
            return Err(RateError::InvalidSpec(format!(
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
            semigroup: semigroup_factor(grid, tg.dt()),
        })
    }

    pub fn grid(&self) -> &SpectralGrid<T> {
        self.grid
    }

    pub fn time_grid(&self) -> &TimeGrid<T> {
        &self.tg
    }

    pub fn channels(&self) -> usize {
        self.coeffs.channels()
    }

    /// Terminal state of the forward map, `(L h)(T)`.
    pub fn forward_terminal(&self, h: &Control<T>) -> Result<SpectralField<T>, RateError> {
        let traj = solve_skeleton(
            self.grid,
            self.coeffs,
            &self.tg,
            self.base,
            h,
            RecordPolicy::NormsOnly,
        )?;
        Ok(traj.final_field().clone())
    }

    /// All node states `X⁰ … X^N` of the forward map.
    pub fn forward_states(&self, h: &Control<T>) -> Result<Vec<SpectralField<T>>, RateError> {
        let mut stepper = SkeletonStepper::new(self.grid, self.coeffs, self.tg, self.base, h)?;
        let mut states = Vec::with_capacity(self.tg.n_nodes());
        states.push(stepper.state().clone());
        for _ in 0..self.tg.n_steps() {
            stepper.step()?;
            states.push(stepper.state().clone());
        }
        Ok(states)
    }

    /// Adjoint of the terminal map in the `⟨·,·⟩_V` / [`control_inner`]
    /// pairing: `⟨L h, w⟩_V = control_inner(h, adjoint_terminal(w))` exactly
    /// (up to roundoff) for every control `h` and state `w`.
    pub fn adjoint_terminal(&self, w: &SpectralField<T>) -> Control<T> {
        self.adjoint_sweep(w.clone(), None)
    }

    /// Backward sweep shared by the terminal adjoint and trajectory-misfit
    /// gradients.  `p` enters as the cotangent of the final node; `sources`,
    /// when present, holds the cotangent injected at each earlier node.
    fn adjoint_sweep(
        &self,
        mut p: SpectralField<T>,
        sources: Option<&[SpectralField<T>]>,
    ) -> Control<T> {
        let dt = self.tg.dt();
        let m = self.coeffs.channels();
        let n_steps = self.tg.n_steps();
        let mut slots = vec![T::zero(); m * n_steps];

        for n in (0..n_steps).rev() {
            let t = self.tg.node_time(n);
            let u0 = self.base.field(n);

            // q = E p^{n+1}; the lifted copy feeds both transposed blocks
            // that contain the inverse Helmholtz factor.
            p.scale_per_mode(&self.semigroup);
            let lifted = hat_lift(self.grid, &p);

            // Control slot n: project q onto the lifted channel shapes.
            let gs = self.coeffs.noise.eval_g(self.grid, u0, t);
            for (j, g) in gs.iter().enumerate() {
                slots[n * m + j] = self.grid.inner_v(g, &lifted);
            }

            if n > 0 {
                // p^n = (I + dt A_nᵀ) q (+ node source), with
                // A_nᵀ q = −(B̂(·,u⁰)+B̂(u⁰,·))ᵀ q + F̂′(u⁰)ᵀ (I+αA)⁻¹ q.
                let mut at = linearized_b_sum_adjoint(self.grid, self.base.cache(n), &p);
                at.scale(-T::one());
                at.axpy(
                    T::one(),
                    &self.coeffs.forcing.eval_f_prime_adjoint(self.grid, u0, t, &lifted),
                );
                p.axpy(dt, &at);
                if let Some(srcs) = sources {
                    p.axpy(T::one(), &srcs[n]);
                }
            }
        }
        Control::from_values(m, n_steps, slots)
    }

    /// Value and exact gradient of the misfit
    /// `J(h) = ½‖(Lh)(T) − x_T‖_V²` (terminal mode) or
    /// `J(h) = ½ Σ_n w_n ‖X^n − g_n‖_V²` with trapezoidal weights
    /// (trajectory mode), differentiated through the discrete forward map.
    pub fn adjoint_gradient(
        &self,
        target: &TargetSpec<T>,
        h: &Control<T>,
    ) -> Result<GradientReport<T>, RateError> {
        target.validate(self.grid, &self.tg)?;
        let half = real::<T>(0.5);
        match target {
            TargetSpec::Terminal(x_t) => {
                let mut r = self.forward_terminal(h)?;
                r.axpy(-T::one(), x_t);
                let value = half * self.grid.inner_v(&r, &r);
                Ok(GradientReport {
                    value,
                    gradient: self.adjoint_sweep(r, None),
                })
            }
            TargetSpec::Trajectory(gs) => {
                let states = self.forward_states(h)?;
                let weights = trapezoid_weights(&self.tg);
                let mut value = T::zero();
                let mut sources = Vec::with_capacity(states.len());
                for ((x, g), &w) in states.iter().zip(gs).zip(&weights) {
                    let mut r = x.clone();
                    r.axpy(-T::one(), g);
                    value = value + half * w * self.grid.inner_v(&r, &r);
                    r.scale(w);
                    sources.push(r);
                }
                let p_final = sources.pop().expect("states are never empty");
                Ok(GradientReport {
                    value,
                    gradient: self.adjoint_sweep(p_final, Some(&sources)),
                })
            }
        }
    }
}
