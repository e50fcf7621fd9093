use crate::Forcing;
use spectral_core::{Scalar, SpectralField, SpectralGrid};

/// F(u) = κ·u. The derivative is exact and the Lipschitz constant is
/// attained by every pair, which makes this the sharpest possible probe of
/// the sampling harness.
#[derive(Debug, Clone, Copy)]
pub struct LinearF<T: Scalar> {
    kappa: T,
}

impl<T: Scalar> LinearF<T> {
    pub fn new(kappa: T) -> Self {
        assert!(kappa >= T::zero(), "forcing gain must be nonnegative");
        Self { kappa }
    }

    pub fn kappa(&self) -> T {
        self.kappa
    }
}

impl<T: Scalar> Forcing<T> for LinearF<T> {
    fn eval_f(&self, _grid: &SpectralGrid<T>, u: &SpectralField<T>, _t: T) -> SpectralField<T> {
        u.scaled(self.kappa)
    }

    fn eval_f_prime(
        &self,
        _grid: &SpectralGrid<T>,
        _u: &SpectralField<T>,
        _t: T,
        dir: &SpectralField<T>,
    ) -> SpectralField<T> {
        dir.scaled(self.kappa)
    }

    fn lipschitz_c1(&self) -> T {
        self.kappa
    }

    fn derivative_bound_c2(&self) -> T {
        self.kappa
    }

    fn name(&self) -> &'static str {
        "linear-forcing"
    }
}

/// F(u) = κ·u / (1 + ‖u‖_V): a genuinely nonlinear forcing with an analytic
/// Gateaux derivative
///
/// F′(u; v) = κ [ v/(1+s) − u·(u,v)_V / (s(1+s)²) ],  s = ‖u‖_V,
///
/// and F′(0; v) = κv. Both the Lipschitz constant and the derivative bound
/// equal κ: the difference quotient is bounded by κ(1+2m)/(1+m)² ≤ κ with
/// m the smaller of the two norms, and ‖F′(u)‖_{L(V)} ≤ κ(1+2s)/(1+s)² ≤ κ.
/// F′ is V-self-adjoint, as the displayed form is symmetric in (v, w).
#[derive(Debug, Clone, Copy)]
pub struct SaturatingF<T: Scalar> {
    kappa: T,
}

impl<T: Scalar> SaturatingF<T> {
    pub fn new(kappa: T) -> Self {
        assert!(kappa >= T::zero(), "forcing gain must be nonnegative");
        Self { kappa }
    }

    pub fn kappa(&self) -> T {
        self.kappa
    }
}

impl<T: Scalar> Forcing<T> for SaturatingF<T> {
    fn eval_f(&self, grid: &SpectralGrid<T>, u: &SpectralField<T>, _t: T) -> SpectralField<T> {
        let s = grid.norm_v(u);
        u.scaled(self.kappa / (T::one() + s))
    }

    fn eval_f_prime(
        &self,
        grid: &SpectralGrid<T>,
        u: &SpectralField<T>,
        _t: T,
        dir: &SpectralField<T>,
    ) -> SpectralField<T> {
        let s = grid.norm_v(u);
        if s <= T::zero() {
            return dir.scaled(self.kappa);
        }
        let one_plus = T::one() + s;
        let mut out = dir.scaled(self.kappa / one_plus);
        let coeff = -self.kappa * grid.inner_v(u, dir) / (s * one_plus * one_plus);
        out.axpy(coeff, u);
        out
    }

    fn lipschitz_c1(&self) -> T {
        self.kappa
    }

    fn derivative_bound_c2(&self) -> T {
        self.kappa
    }

    fn name(&self) -> &'static str {
        "saturating-forcing"
    }
}
