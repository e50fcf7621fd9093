//! Sampled verification of the declared coefficient structure.

use coefficients::{
    check_lipschitz, check_lipschitz_on, derivative_check, hat_lift, CoefficientError,
    CoefficientSet, DiagonalG, Forcing, LinearF, ProjectionG, SaturatingF,
};
use spectral_core::{leray_project, random_field, Field64, Grid64, SpectralField, SpectralGrid};
use std::sync::Arc;

fn grid() -> Grid64 {
    Grid64::new(8, 1.0, 0.1).unwrap()
}

fn set_of(
    forcing: impl Forcing<f64> + 'static,
    noise: impl coefficients::NoiseMap<f64> + 'static,
) -> CoefficientSet<f64> {
    CoefficientSet::new(Arc::new(forcing), Arc::new(noise))
}

#[test]
fn linear_forcing_ratio_is_exactly_kappa() {
    let g = grid();
    let set = set_of(LinearF::new(0.3), DiagonalG::new(vec![0.3, 0.2]));
    let report = check_lipschitz(&g, &set, 6, 99).unwrap();
    assert!(report.pass);
    assert!((report.forcing_max_ratio - 0.3).abs() <= 1e-12);
    // DiagonalG attains its bound on every pair too.
    let expected = (0.3f64 * 0.3 + 0.2 * 0.2).sqrt();
    assert!((report.noise_max_ratio - expected).abs() <= 1e-12);
}

#[test]
fn projection_noise_stays_below_the_rank_one_bound() {
    let g = grid();
    let set = set_of(LinearF::new(0.2), ProjectionG::new(&g, vec![0.1, 0.2], 5));
    let report = check_lipschitz(&g, &set, 8, 17).unwrap();
    assert!(report.pass);
    let bound = (0.01f64 + 0.04).sqrt();
    assert!(report.noise_max_ratio <= bound * (1.0 + 1e-6));
    assert!(report.noise_max_ratio > 0.0);
}

#[test]
fn saturating_forcing_respects_declared_constants() {
    let g = grid();
    let set = set_of(SaturatingF::new(0.5), DiagonalG::new(vec![0.1]));
    let report = check_lipschitz(&g, &set, 9, 23).unwrap();
    assert!(report.pass);
    assert!(report.forcing_max_ratio <= 0.5 * (1.0 + 1e-6));
    assert!(report.forcing_max_ratio > 0.05, "sampling should exercise the map");
}

#[test]
fn coincident_samples_are_skipped_not_divided() {
    let g = grid();
    let set = set_of(LinearF::new(0.3), DiagonalG::new(vec![0.2]));
    let u = random_field(&g, 1, 2.0).unwrap();
    let report = check_lipschitz_on(&g, &set, &[u.clone(), u]).unwrap();
    assert!(report.pass);
    assert_eq!(report.pairs_sampled, 0);
    assert_eq!(report.forcing_max_ratio, 0.0);
}

#[test]
fn too_few_samples_is_an_error() {
    let g = grid();
    let set = set_of(LinearF::new(0.3), DiagonalG::new(vec![0.2]));
    assert!(matches!(
        check_lipschitz(&g, &set, 1, 0),
        Err(CoefficientError::InsufficientSamples(1))
    ));
}

/// A forcing that under-declares its Lipschitz constant: the harness must
/// call it out and identify a witness pair.
struct UnderDeclared;

impl Forcing<f64> for UnderDeclared {
    fn eval_f(&self, _g: &SpectralGrid<f64>, u: &Field64, _t: f64) -> Field64 {
        u.scaled(0.4)
    }
    fn eval_f_prime(
        &self,
        _g: &SpectralGrid<f64>,
        _u: &Field64,
        _t: f64,
        dir: &Field64,
    ) -> Field64 {
        dir.scaled(0.4)
    }
    fn lipschitz_c1(&self) -> f64 {
        0.2
    }
    fn derivative_bound_c2(&self) -> f64 {
        0.4
    }
    fn name(&self) -> &'static str {
        "under-declared-forcing"
    }
}

#[test]
fn under_declared_constant_is_reported_with_the_offending_pair() {
    let g = grid();
    let set = set_of(UnderDeclared, DiagonalG::new(vec![0.2]));
    match check_lipschitz(&g, &set, 4, 3) {
        Err(CoefficientError::LipschitzViolation { map, ratio, bound, first, second }) => {
            assert_eq!(map, "under-declared-forcing");
            assert!(ratio > bound);
            assert!(first < second);
        }
        other => panic!("expected a Lipschitz violation, got {other:?}"),
    }
}

#[test]
fn linear_derivative_is_exact_and_saturating_passes_fd() {
    let g = grid();
    let u = random_field(&g, 31, 2.0).unwrap();
    let v = random_field(&g, 32, 2.0).unwrap();

    let lin = set_of(LinearF::new(0.2), DiagonalG::new(vec![0.1]));
    let err = derivative_check(&g, &lin, &u, &v, 0.0).unwrap();
    assert!(err <= 1e-12, "linear FD error {err:e}");

    let sat = set_of(SaturatingF::new(0.2), DiagonalG::new(vec![0.1]));
    let err = derivative_check(&g, &sat, &u, &v, 0.0).unwrap();
    assert!(err <= 1e-6, "saturating FD error {err:e}");

    let zero = g.zero_field();
    assert!(matches!(
        derivative_check(&g, &sat, &u, &zero, 0.0),
        Err(CoefficientError::ZeroDirection)
    ));
}

#[test]
fn mean_value_remainder_is_second_order_for_saturating_f() {
    let g = grid();
    let sat = SaturatingF::new(0.5);
    let u = random_field(&g, 41, 2.0).unwrap();
    let w = random_field(&g, 42, 2.0).unwrap();
    let remainder = |step: f64| -> f64 {
        let mut u1 = u.clone();
        u1.axpy(step, &w);
        let mut r = sat.eval_f(&g, &u1, 0.0);
        r.axpy(-1.0, &sat.eval_f(&g, &u, 0.0));
        let mut dir = u1.clone();
        dir.axpy(-1.0, &u);
        r.axpy(-1.0, &sat.eval_f_prime(&g, &u, 0.0, &dir));
        g.norm_v(&r)
    };
    let r1 = remainder(0.2);
    let r2 = remainder(0.1);
    let r3 = remainder(0.05);
    // Quadratic decay: halving the step shrinks the remainder ~4×.
    assert!(r2 <= r1 / 4.0 * 1.5, "r(0.2) = {r1:e}, r(0.1) = {r2:e}");
    assert!(r3 <= r2 / 4.0 * 1.5, "r(0.1) = {r2:e}, r(0.05) = {r3:e}");
}

#[test]
fn hat_lift_halves_the_unit_mode_and_respects_linearity() {
    let g = grid();
    assert_eq!(hat_lift(&g, &g.zero_field()).max_abs(), 0.0);

    let mut e = g.zero_field();
    e.set_conjugate_pair(0, 1, num_complex::Complex::new(0.5, -0.2), num_complex::Complex::new(0.0, 0.0));
    let lifted = hat_lift(&g, &e);
    assert!(lifted.sub(&e.scaled(0.5)).max_abs() < 1e-15);

    let a = random_field(&g, 51, 2.0).unwrap();
    let b = random_field(&g, 52, 2.0).unwrap();
    let mut comb = a.scaled(1.3);
    comb.axpy(-0.7, &b);
    let lhs = hat_lift(&g, &comb);
    let mut rhs = hat_lift(&g, &a).scaled(1.3);
    rhs.axpy(-0.7, &hat_lift(&g, &b));
    assert!(lhs.sub(&rhs).max_abs() <= 1e-14 * lhs.max_abs().max(1.0));

    let pl = leray_project(&g, &hat_lift(&g, &a));
    let lp = hat_lift(&g, &leray_project(&g, &a));
    assert!(pl.sub(&lp).max_abs() <= 1e-14 * pl.max_abs().max(1.0));
}

#[test]
fn lifted_forcing_is_a_v_contraction_of_the_declared_constant() {
    // ‖F̂(u)−F̂(v)‖_V ≤ C₁‖u−v‖_V: the lift is a V-contraction on top of F's
    // own bound.
    let g = grid();
    let sat = SaturatingF::new(0.5);
    for seed in 0..5u64 {
        let u = random_field(&g, 60 + seed, 2.0).unwrap();
        let v = random_field(&g, 70 + seed, 2.0).unwrap();
        let mut df = hat_lift(&g, &sat.eval_f(&g, &u, 0.0));
        df.axpy(-1.0, &hat_lift(&g, &sat.eval_f(&g, &v, 0.0)));
        let mut du = u.clone();
        du.axpy(-1.0, &v);
        assert!(g.norm_v(&df) <= 0.5 * g.norm_v(&du) * (1.0 + 1e-12));
    }
}

#[test]
fn constant_test_noise_reports_zero_lipschitz_constant() {
    let g = grid();
    let shape: SpectralField<f64> = random_field(&g, 81, 2.5).unwrap();
    let set = set_of(LinearF::new(0.2), coefficients::testing::ConstantG::new(vec![shape]));
    let report = check_lipschitz(&g, &set, 4, 7).unwrap();
    assert!(report.pass);
    assert_eq!(report.noise_max_ratio, 0.0);
    assert_eq!(report.noise_bound, 0.0);
}
