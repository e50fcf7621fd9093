//! The moderate-deviation solvers are validated against their defining
//! rescaling identities: the direct deviation solve must reproduce the
//! centered difference of two primal solves on the same path, the controlled
//! equation must collapse to the uncontrolled one when the control vanishes,
//! and it must converge to the skeleton as the noise is switched off.

use coefficients::{CoefficientSet, Forcing, LinearF, NoiseMap, ProjectionG, SaturatingF};
use dynamics::{
    brownian_path, solve_controlled_mdp, solve_skeleton, solve_spde, solve_z_eps, Control,
    FrozenBase, NoisePath, RecordPolicy, TimeGrid,
};
use spectral_core::{dealias, random_field, Grid64};
use std::sync::Arc;

struct Setup {
    grid: Grid64,
    set: CoefficientSet<f64>,
    tg: TimeGrid<f64>,
    base: FrozenBase<f64>,
    initial: spectral_core::SpectralField<f64>,
}

fn setup(forcing: Arc<dyn Forcing<f64>>) -> Setup {
    let grid = Grid64::new(6, 1.0, 0.1).unwrap();
    let noise_map: Arc<dyn NoiseMap<f64>> = Arc::new(ProjectionG::new(&grid, vec![0.3, 0.2], 44));
    let set = CoefficientSet::new(forcing, noise_map);
    let tg = TimeGrid::new(0.25, 125).unwrap();
    let initial = dealias(&grid, &random_field(&grid, 321, 4.0).unwrap());
    let zero = NoisePath::zeros(2, tg.n_steps());
    let limit = solve_spde(&grid, &set, &tg, &initial, 0.0, &zero, RecordPolicy::EveryNode)
        .unwrap();
    let base = FrozenBase::new(&grid, &limit).unwrap();
    Setup {
        grid,
        set,
        tg,
        base,
        initial,
    }
}

/// Per-node identity `Z = (u^eps - u⁰) / (sqrt(eps) lambda)`: the direct
/// deviation recursion is algebraically the centered difference of the two
/// primal recursions, so on a shared path they agree to roundoff.
fn assert_z_identity(s: &Setup, tol: f64) {
    let (eps, lambda) = (1e-4f64, 10.0);
    let scale = eps.sqrt() * lambda;
    let noise = brownian_path(777, 2, &s.tg);

    let primal = solve_spde(
        &s.grid, &s.set, &s.tg, &s.initial, eps, &noise, RecordPolicy::EveryNode,
    )
    .unwrap();
    let direct = solve_z_eps(
        &s.grid, &s.set, &s.tg, &s.base, eps, lambda, &noise, RecordPolicy::EveryNode,
    )
    .unwrap();

    let mut worst = 0.0f64;
    for node in 0..=s.tg.n_steps() {
        let mut diff = primal.field_at(node).unwrap().clone();
        diff.axpy(-1.0, s.base.field(node));
        diff.scale(1.0 / scale);
        diff.axpy(-1.0, direct.field_at(node).unwrap());
        worst = worst.max(s.grid.norm_v(&diff));
    }
    assert!(
        worst <= tol,
        "deviation identity violated: worst per-node gap {worst:.3e} > {tol:.1e}"
    );
}

#[test]
fn deviation_identity_linear_forcing() {
    let s = setup(Arc::new(LinearF::new(0.2)));
    assert_z_identity(&s, 1e-10);
}

/// The identity is structural, not tied to linear forcing: the nonlinear
/// saturating forcing obeys it at the same accuracy because the solver
/// evaluates the exact forcing quotient rather than its linearization.
#[test]
fn deviation_identity_saturating_forcing() {
    let s = setup(Arc::new(SaturatingF::new(0.3)));
    assert_z_identity(&s, 1e-10);
}

/// With the zero control the controlled equation *is* the uncontrolled one:
/// same code path, bitwise equality.
#[test]
fn controlled_solve_with_zero_control_is_the_plain_deviation() {
    let s = setup(Arc::new(LinearF::new(0.2)));
    let (eps, lambda) = (1e-2, 4.0);
    let noise = brownian_path(99, 2, &s.tg);
    let zero_control = Control::zeros(2, s.tg.n_steps());

    let plain = solve_z_eps(
        &s.grid, &s.set, &s.tg, &s.base, eps, lambda, &noise, RecordPolicy::NormsOnly,
    )
    .unwrap();
    let controlled = solve_controlled_mdp(
        &s.grid, &s.set, &s.tg, &s.base, eps, lambda, &zero_control, &noise,
        RecordPolicy::NormsOnly,
    )
    .unwrap();
    let mut d = plain.final_field().clone();
    d.axpy(-1.0, controlled.final_field());
    assert_eq!(d.max_abs(), 0.0);
}

/// Switching the noise off and sending eps -> 0 collapses the controlled
/// deviation equation onto the skeleton: the gap shrinks with eps and is
/// tiny at eps = 1e-8.
#[test]
fn controlled_solve_converges_to_the_skeleton() {
    let s = setup(Arc::new(SaturatingF::new(0.3)));
    let lambda = 4.0;
    let control = Control::smooth_random(3, 2, &s.tg, 2.0);
    let zero = NoisePath::zeros(2, s.tg.n_steps());

    let skeleton = solve_skeleton(
        &s.grid, &s.set, &s.tg, &s.base, &control, RecordPolicy::NormsOnly,
    )
    .unwrap();

    let gap = |eps: f64| -> f64 {
        let x = solve_controlled_mdp(
            &s.grid, &s.set, &s.tg, &s.base, eps, lambda, &control, &zero,
            RecordPolicy::NormsOnly,
        )
        .unwrap();
        let mut d = x.final_field().clone();
        d.axpy(-1.0, skeleton.final_field());
        s.grid.norm_v(&d)
    };

    let g4 = gap(1e-4);
    let g6 = gap(1e-6);
    let g8 = gap(1e-8);
    assert!(
        g6 < g4 && g8 < g6,
        "gap to skeleton must shrink with eps: {g4:.3e}, {g6:.3e}, {g8:.3e}"
    );
    assert!(
        g8 <= 1e-4 * skeleton.sup_norm_v().max(1e-12),
        "gap at eps = 1e-8 still large: {g8:.3e}"
    );
}

/// Deviation solves reject non-positive lambda and non-positive eps, and the
/// uncontrolled deviation with a zero path stays exactly zero.
#[test]
fn deviation_input_validation_and_zero_path() {
    let s = setup(Arc::new(LinearF::new(0.2)));
    let noise = NoisePath::zeros(2, s.tg.n_steps());
    assert!(matches!(
        solve_z_eps(
            &s.grid, &s.set, &s.tg, &s.base, 1e-4, 0.0, &noise, RecordPolicy::NormsOnly
        ),
        Err(dynamics::DynamicsError::LambdaNotPositive(_))
    ));
    assert!(matches!(
        solve_z_eps(
            &s.grid, &s.set, &s.tg, &s.base, 1e-4, -1.0, &noise, RecordPolicy::NormsOnly
        ),
        Err(dynamics::DynamicsError::LambdaNotPositive(_))
    ));
    assert!(matches!(
        solve_z_eps(
            &s.grid, &s.set, &s.tg, &s.base, 0.0, 2.0, &noise, RecordPolicy::NormsOnly
        ),
        Err(dynamics::DynamicsError::EpsilonOutOfRange(_))
    ));

    let z = solve_z_eps(
        &s.grid, &s.set, &s.tg, &s.base, 1e-4, 10.0, &noise, RecordPolicy::NormsOnly,
    )
    .unwrap();
    assert_eq!(z.sup_norm_v(), 0.0);
}

/// Moderate-deviation trajectories stay bounded in the regime the scaling
/// analysis covers: eps = 1e-4, lambda = eps^{-1/4}, a spread of seeds.
#[test]
fn deviation_trajectories_stay_bounded_across_seeds() {
    let s = setup(Arc::new(LinearF::new(0.2)));
    let eps = 1e-4f64;
    let lambda = eps.powf(-0.25);
    for sample in 0..10 {
        let noise = brownian_path(dynamics::sample_seed(31337, sample), 2, &s.tg);
        let z = solve_z_eps(
            &s.grid, &s.set, &s.tg, &s.base, eps, lambda, &noise, RecordPolicy::NormsOnly,
        )
        .unwrap();
        let sup = z.sup_norm_v();
        assert!(
            sup.is_finite() && sup < 1e3,
            "sample {sample}: sup |Z|_V = {sup:.3e} not in the bounded regime"
        );
    }
}
