//! Exponential one-step integrators for the equation family.
//!
//! Every scheme factors the stiff Stokes part exactly: with
//! `E = exp(-nu Â dt)` applied mode-by-mode, a step maps the explicit part of
//! the increment through `E`, so the linear decay is integrated without any
//! step-size restriction and a single Fourier mode with all other terms
//! switched off is propagated to machine accuracy.
//!
//! * [`DeterministicStepper`] uses a two-stage exponential Heun rule
//!   (predictor `ũ = E(u + dt N(u, t))`, corrector averaging `E N(u, t)` and
//!   `N(ũ, t + dt)`), second order in `dt`.
//! * The stochastic steppers use the exponential Euler–Maruyama rule
//!   `u⁺ = E[u + dt drift(u, t) + diffusion(u, t) dW]`.  The semigroup
//!   multiplies the noise increment as well; this makes the centered,
//!   rescaled deviation of the primal scheme satisfy *the same* discrete
//!   recursion as the direct deviation solver, so the rescaling identities
//!   hold step-by-step at roundoff level rather than up to `O(dt)`.
//!
//! All steppers guard against blow-up: if the `V`-norm of the state exceeds
//! `10^6 x max(initial norm, 1)` the step reports
//! [`DynamicsError::BlowUp`] instead of returning overflowed fields.

use crate::control::Control;
use crate::error::DynamicsError;
use crate::frozen::FrozenBase;
use crate::noise::NoisePath;
use crate::time::TimeGrid;
use coefficients::{hat_lift, CoefficientSet};
use spectral_core::{b_hat, bilinear_sum_about, linearized_b_sum, real, Scalar, SpectralField, SpectralGrid};

/// Per-mode factors of the dissipative semigroup over one step,
/// `exp(-nu |k|^2 dt / (1 + alpha |k|^2))`, in lattice order.
pub fn semigroup_factor<T: Scalar>(grid: &SpectralGrid<T>, dt: T) -> Vec<T> {
    let nu = grid.nu();
    grid.a_hat_symbol()
        .iter()
        .map(|&a| (-nu * a * dt).exp())
        .collect()
}

fn guard_limit<T: Scalar>(initial_norm: T) -> T {
    real::<T>(1e6) * initial_norm.max(T::one())
}

fn check_guard<T: Scalar>(
    grid: &SpectralGrid<T>,
    state: &SpectralField<T>,
    equation: &'static str,
    step: usize,
    limit: T,
) -> Result<(), DynamicsError> {
    let norm = grid.norm_v(state);
    if norm <= limit {
        Ok(())
    } else {
        Err(DynamicsError::BlowUp {
            equation,
            step,
            norm: norm.to_f64().unwrap_or(f64::NAN),
            limit: limit.to_f64().unwrap_or(f64::NAN),
        })
    }
}

/// Uniform view of the one-step integrators: inspect the state, advance one
/// node.  Lockstep coupling of two equations (for strong-convergence or
/// pathwise-difference measurements) drives two steppers side by side.
pub trait Stepper<T: Scalar> {
    /// State at the current node.
    fn state(&self) -> &SpectralField<T>;

    /// Index of the current node (starts at 0).
    fn node(&self) -> usize;

    /// Advance from node `n` to `n + 1`.
    fn step(&mut self) -> Result<(), DynamicsError>;
}

/// Two-stage exponential integrator for the deterministic limit equation
/// `du + nu Â u dt + B̂(u,u) dt = F̂(u,t) dt`.
pub struct DeterministicStepper<'a, T: Scalar> {
    grid: &'a SpectralGrid<T>,
    coeffs: &'a CoefficientSet<T>,
    tg: TimeGrid<T>,
    semigroup: Vec<T>,
    state: SpectralField<T>,
    node: usize,
    limit: T,
}

impl<'a, T: Scalar> DeterministicStepper<'a, T> {
    pub fn new(
        grid: &'a SpectralGrid<T>,
        coeffs: &'a CoefficientSet<T>,
        tg: TimeGrid<T>,
        initial: SpectralField<T>,
    ) -> Self {
        let limit = guard_limit(grid.norm_v(&initial));
        Self {
            grid,
            coeffs,
            tg,
            semigroup: semigroup_factor(grid, tg.dt()),
            state: initial,
            node: 0,
            limit,
        }
    }

    /// The explicit part `N(u, t) = -B̂(u,u) + F̂(u,t)`.
    fn nonlinearity(&self, u: &SpectralField<T>, t: T) -> SpectralField<T> {
        let mut n = b_hat(self.grid, u, u);
        n.scale(-T::one());
        let f = self.coeffs.forcing.eval_f(self.grid, u, t);
        n.axpy(T::one(), &hat_lift(self.grid, &f));
        n
    }
}

impl<T: Scalar> Stepper<T> for DeterministicStepper<'_, T> {
    fn state(&self) -> &SpectralField<T> {
        &self.state
    }

    fn node(&self) -> usize {
        self.node
    }

    fn step(&mut self) -> Result<(), DynamicsError> {
        let dt = self.tg.dt();
        let t = self.tg.node_time(self.node);
        let half = dt / real::<T>(2.0);

        let k1 = self.nonlinearity(&self.state, t);
        let mut predictor = self.state.clone();
        predictor.axpy(dt, &k1);
        predictor.scale_per_mode(&self.semigroup);
        let k2 = self.nonlinearity(&predictor, t + dt);

        let mut ek1 = k1;
        ek1.scale_per_mode(&self.semigroup);
        self.state.scale_per_mode(&self.semigroup);
        self.state.axpy(half, &ek1);
        self.state.axpy(half, &k2);

        self.node += 1;
        check_guard(self.grid, &self.state, "deterministic limit", self.node, self.limit)
    }
}

/// Exponential Euler–Maruyama stepper for the primal stochastic equation
/// `du + nu Â u dt + B̂(u,u) dt = F̂(u,t) dt + sqrt(eps) Ĝ(u,t) dW`.
///
/// `epsilon = 0` integrates the deterministic limit with the same first-order
/// scheme (the noise path is then ignored entirely), which is what the
/// rescaled-deviation identities difference against.
pub struct SpdeStepper<'a, T: Scalar> {
    grid: &'a SpectralGrid<T>,
    coeffs: &'a CoefficientSet<T>,
    noise: &'a NoisePath<T>,
    tg: TimeGrid<T>,
    sqrt_eps: T,
    semigroup: Vec<T>,
    state: SpectralField<T>,
    node: usize,
    limit: T,
}

impl<'a, T: Scalar> SpdeStepper<'a, T> {
    pub fn new(
        grid: &'a SpectralGrid<T>,
        coeffs: &'a CoefficientSet<T>,
        tg: TimeGrid<T>,
        initial: SpectralField<T>,
        epsilon: T,
        noise: &'a NoisePath<T>,
    ) -> Result<Self, DynamicsError> {
        if !(epsilon >= T::zero()) || !epsilon.is_finite() {
            return Err(DynamicsError::EpsilonOutOfRange(
                epsilon.to_f64().unwrap_or(f64::NAN),
            ));
        }
        noise.check_shape(coeffs.channels(), tg.n_steps())?;
        let limit = guard_limit(grid.norm_v(&initial));
        Ok(Self {
            grid,
            coeffs,
            noise,
            tg,
            sqrt_eps: epsilon.sqrt(),
            semigroup: semigroup_factor(grid, tg.dt()),
            state: initial,
            node: 0,
            limit,
        })
    }
}

impl<T: Scalar> Stepper<T> for SpdeStepper<'_, T> {
    fn state(&self) -> &SpectralField<T> {
        &self.state
    }

    fn node(&self) -> usize {
        self.node
    }

    fn step(&mut self) -> Result<(), DynamicsError> {
        let dt = self.tg.dt();
        let t = self.tg.node_time(self.node);

        let mut incr = b_hat(self.grid, &self.state, &self.state);
        incr.scale(-dt);
        let f = self.coeffs.forcing.eval_f(self.grid, &self.state, t);
        incr.axpy(dt, &hat_lift(self.grid, &f));
        if self.sqrt_eps > T::zero() {
            let g = self.coeffs.noise.eval_g_weighted(
                self.grid,
                &self.state,
                t,
                self.noise.increments(self.node),
            );
            incr.axpy(self.sqrt_eps, &hat_lift(self.grid, &g));
        }
        self.state.axpy(T::one(), &incr);
        self.state.scale_per_mode(&self.semigroup);

        self.node += 1;
        check_guard(self.grid, &self.state, "stochastic primal", self.node, self.limit)
    }
}

/// Exponential Euler–Maruyama stepper for the Gaussian fluctuation equation
/// `dV + nu Â V dt + [B̂(V,u⁰) + B̂(u⁰,V)] dt = F̂′(u⁰,t)V dt + Ĝ(u⁰,t) dW`
/// along a frozen base trajectory, started from `V(0) = 0`.
pub struct CltStepper<'a, T: Scalar> {
    grid: &'a SpectralGrid<T>,
    coeffs: &'a CoefficientSet<T>,
    base: &'a FrozenBase<T>,
    noise: &'a NoisePath<T>,
    tg: TimeGrid<T>,
    semigroup: Vec<T>,
    state: SpectralField<T>,
    node: usize,
    limit: T,
}

impl<'a, T: Scalar> CltStepper<'a, T> {
    pub fn new(
        grid: &'a SpectralGrid<T>,
        coeffs: &'a CoefficientSet<T>,
        tg: TimeGrid<T>,
        base: &'a FrozenBase<T>,
        noise: &'a NoisePath<T>,
    ) -> Result<Self, DynamicsError> {
        noise.check_shape(coeffs.channels(), tg.n_steps())?;
        base.check_length(tg.n_steps())?;
        Ok(Self {
            grid,
            coeffs,
            base,
            noise,
            tg,
            semigroup: semigroup_factor(grid, tg.dt()),
            state: grid.zero_field(),
            node: 0,
            limit: guard_limit(T::zero()),
        })
    }
}

impl<T: Scalar> Stepper<T> for CltStepper<'_, T> {
    fn state(&self) -> &SpectralField<T> {
        &self.state
    }

    fn node(&self) -> usize {
        self.node
    }

    fn step(&mut self) -> Result<(), DynamicsError> {
        let dt = self.tg.dt();
        let t = self.tg.node_time(self.node);
        let u0 = self.base.field(self.node);
        let cache = self.base.cache(self.node);

        let mut incr = linearized_b_sum(self.grid, cache, &self.state);
        incr.scale(-dt);
        let fp = self.coeffs.forcing.eval_f_prime(self.grid, u0, t, &self.state);
        incr.axpy(dt, &hat_lift(self.grid, &fp));
        let g = self
            .coeffs
            .noise
            .eval_g_weighted(self.grid, u0, t, self.noise.increments(self.node));
        incr.axpy(T::one(), &hat_lift(self.grid, &g));
        self.state.axpy(T::one(), &incr);
        self.state.scale_per_mode(&self.semigroup);

        self.node += 1;
        check_guard(self.grid, &self.state, "clt linearization", self.node, self.limit)
    }
}

/// Exponential Euler–Maruyama stepper for the moderate-deviation equation,
/// optionally with a control acting through the noise shape:
///
/// `dX + nu Â X dt + [B̂(X, u⁰ + s X) + B̂(u⁰, X)] dt
///    = (1/s)[F̂(u⁰ + s X, t) − F̂(u⁰, t)] dt
///    + Ĝ(u⁰ + s X, t) hdot dt + (1/lambda) Ĝ(u⁰ + s X, t) dW`,
///
/// where `s = sqrt(eps) lambda` and `X(0) = 0`.  Without a control this is
/// the centered, rescaled deviation `Z = (u^eps − u⁰) / s`; its discrete
/// recursion is algebraically identical to differencing two primal solves on
/// the same path, so the identity holds at roundoff level.
pub struct DeviationStepper<'a, T: Scalar> {
    grid: &'a SpectralGrid<T>,
    coeffs: &'a CoefficientSet<T>,
    base: &'a FrozenBase<T>,
    noise: &'a NoisePath<T>,
    control: Option<&'a Control<T>>,
    tg: TimeGrid<T>,
    scale: T,
    inv_lambda: T,
    semigroup: Vec<T>,
    state: SpectralField<T>,
    node: usize,
    limit: T,
}

impl<'a, T: Scalar> DeviationStepper<'a, T> {
    pub fn new(
        grid: &'a SpectralGrid<T>,
        coeffs: &'a CoefficientSet<T>,
        tg: TimeGrid<T>,
        base: &'a FrozenBase<T>,
        epsilon: T,
        lambda: T,
        control: Option<&'a Control<T>>,
        noise: &'a NoisePath<T>,
    ) -> Result<Self, DynamicsError> {
        if !(lambda > T::zero()) || !lambda.is_finite() {
            return Err(DynamicsError::LambdaNotPositive(
                lambda.to_f64().unwrap_or(f64::NAN),
            ));
        }
        if !(epsilon > T::zero()) || !epsilon.is_finite() {
            return Err(DynamicsError::EpsilonOutOfRange(
                epsilon.to_f64().unwrap_or(f64::NAN),
            ));
        }
        noise.check_shape(coeffs.channels(), tg.n_steps())?;
        if let Some(ctrl) = control {
            if ctrl.channels() != coeffs.channels() || ctrl.n_steps() != tg.n_steps() {
                return Err(DynamicsError::ControlShape {
                    expected_m: coeffs.channels(),
                    expected_steps: tg.n_steps(),
                    got_m: ctrl.channels(),
                    got_steps: ctrl.n_steps(),
                });
            }
        }
        base.check_length(tg.n_steps())?;
        Ok(Self {
            grid,
            coeffs,
            base,
            noise,
            control,
            tg,
            scale: epsilon.sqrt() * lambda,
            inv_lambda: T::one() / lambda,
            semigroup: semigroup_factor(grid, tg.dt()),
            state: grid.zero_field(),
            node: 0,
            limit: guard_limit(T::zero()),
        })
    }
}

impl<T: Scalar> Stepper<T> for DeviationStepper<'_, T> {
    fn state(&self) -> &SpectralField<T> {
        &self.state
    }

    fn node(&self) -> usize {
        self.node
    }

    fn step(&mut self) -> Result<(), DynamicsError> {
        let dt = self.tg.dt();
        let t = self.tg.node_time(self.node);
        let u0 = self.base.field(self.node);
        let cache = self.base.cache(self.node);
        let s = self.scale;

        let mut incr = bilinear_sum_about(self.grid, cache, &self.state, s);
        incr.scale(-dt);

        let mut shifted = u0.clone();
        shifted.axpy(s, &self.state);
        let mut fq = self.coeffs.forcing.eval_f(self.grid, &shifted, t);
        fq.axpy(-T::one(), &self.coeffs.forcing.eval_f(self.grid, u0, t));
        incr.axpy(dt / s, &hat_lift(self.grid, &fq));

        let g = self.coeffs.noise.eval_g_weighted(
            self.grid,
            &shifted,
            t,
            self.noise.increments(self.node),
        );
        incr.axpy(self.inv_lambda, &hat_lift(self.grid, &g));

        if let Some(ctrl) = self.control {
            let gc = self
                .coeffs
                .noise
                .eval_g_weighted(self.grid, &shifted, t, ctrl.values(self.node));
            incr.axpy(dt, &hat_lift(self.grid, &gc));
        }

        self.state.axpy(T::one(), &incr);
        self.state.scale_per_mode(&self.semigroup);

        self.node += 1;
        let label = if self.control.is_some() {
            "controlled moderate deviation"
        } else {
            "moderate deviation"
        };
        check_guard(self.grid, &self.state, label, self.node, self.limit)
    }
}

/// Exponential stepper for the deterministic controlled limit (skeleton)
/// equation `dX + nu Â X dt + [B̂(X,u⁰) + B̂(u⁰,X)] dt
/// = F̂′(u⁰,t)X dt + Ĝ(u⁰,t) hdot dt`, started from `X(0) = 0`.
///
/// One step is the affine map `X ↦ E[(I + dt A_n) X + dt C_n hdot_n]` with
/// `A_n` the frozen linearized drift and `C_n` the frozen noise shape; the
/// minimizing-control machinery differentiates exactly this recursion.
pub struct SkeletonStepper<'a, T: Scalar> {
    grid: &'a SpectralGrid<T>,
    coeffs: &'a CoefficientSet<T>,
    base: &'a FrozenBase<T>,
    control: &'a Control<T>,
    tg: TimeGrid<T>,
    semigroup: Vec<T>,
    state: SpectralField<T>,
    node: usize,
    limit: T,
}

impl<'a, T: Scalar> SkeletonStepper<'a, T> {
    pub fn new(
        grid: &'a SpectralGrid<T>,
        coeffs: &'a CoefficientSet<T>,
        tg: TimeGrid<T>,
        base: &'a FrozenBase<T>,
        control: &'a Control<T>,
    ) -> Result<Self, DynamicsError> {
        if control.channels() != coeffs.channels() || control.n_steps() != tg.n_steps() {
            return Err(DynamicsError::ControlShape {
                expected_m: coeffs.channels(),
                expected_steps: tg.n_steps(),
                got_m: control.channels(),
                got_steps: control.n_steps(),
            });
        }
        base.check_length(tg.n_steps())?;
        Ok(Self {
            grid,
            coeffs,
            base,
            control,
            tg,
            semigroup: semigroup_factor(grid, tg.dt()),
            state: grid.zero_field(),
            node: 0,
            limit: guard_limit(T::zero()),
        })
    }
}

impl<T: Scalar> Stepper<T> for SkeletonStepper<'_, T> {
    fn state(&self) -> &SpectralField<T> {
        &self.state
    }

    fn node(&self) -> usize {
        self.node
    }

    fn step(&mut self) -> Result<(), DynamicsError> {
        let dt = self.tg.dt();
        let t = self.tg.node_time(self.node);
        let u0 = self.base.field(self.node);
        let cache = self.base.cache(self.node);

        let mut incr = linearized_b_sum(self.grid, cache, &self.state);
        incr.scale(-dt);
        let fp = self.coeffs.forcing.eval_f_prime(self.grid, u0, t, &self.state);
        incr.axpy(dt, &hat_lift(self.grid, &fp));
        let gc = self
            .coeffs
            .noise
            .eval_g_weighted(self.grid, u0, t, self.control.values(self.node));
        incr.axpy(dt, &hat_lift(self.grid, &gc));
        self.state.axpy(T::one(), &incr);
        self.state.scale_per_mode(&self.semigroup);

        self.node += 1;
        check_guard(self.grid, &self.state, "skeleton", self.node, self.limit)
    }
}
