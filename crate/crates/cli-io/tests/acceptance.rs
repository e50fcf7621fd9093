//! Desk-scale acceptance gate for the whole workspace.
//!
//! One sequential test walks every headline guarantee end to end and prints a
//! verdict line per stage: exact operator identities, the transform-free
//! convolution oracle, integrator accuracy, the three small-noise scaling
//! laws, the uniform W-moment audit, the minimum-energy rate solver, and
//! bitwise determinism of the binary across worker counts.
//!
//! Run `cargo test -p cli-io --test acceptance -- --nocapture` to watch the
//! lines stream; under plain `cargo test` they surface only on failure.
//! Wall-clock budgets assume four cores and stretch proportionally on
//! smaller hosts.

use std::fs;
use std::process::Command as Process;
use std::sync::Arc;
use std::time::Instant;

use asymptotics::{
    clt_limit_experiment, mdp_condition_a_experiment, primal_gap_experiment, uniform_bound_audit,
    Ensemble,
};
use cli_io::operator_identity_suite;
use coefficients::{testing::ConstantG, CoefficientSet, DiagonalG, LinearF, ProjectionG, SaturatingF};
use dynamics::{
    solve_deterministic, solve_spde, Control, FrozenBase, NoisePath, RecordPolicy, TimeGrid,
};
use num_complex::Complex;
use rate_function::{control_inner, SkeletonMap, TargetSpec};
use spectral_core::testing::{b_hat_convolution_oracle, max_relative_mode_error};
use spectral_core::{b_hat, dealias, random_field, Field64, Grid64};

/// The desk-scale intensity grid: eps in {1e-2, 1e-2.5, 1e-3, 1e-3.5, 1e-4}.
fn intensity_grid() -> [f64; 5] {
    [1e-2, 10f64.powf(-2.5), 1e-3, 10f64.powf(-3.5), 1e-4]
}

/// Budgets are quoted for a four-core desk machine; stretch them linearly
/// when fewer cores are available so slow hosts fail only on real regressions.
fn budget_scale() -> f64 {
    let cores = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
    (4.0 / cores as f64).max(1.0)
}

fn mode_field(grid: &Grid64, k1: i32, k2: i32, amp: f64) -> Field64 {
    // A single divergence-free conjugate pair along k-perp.
    let mut f = grid.zero_field();
    let norm = ((k1 * k1 + k2 * k2) as f64).sqrt();
    f.set_conjugate_pair(
        k1,
        k2,
        Complex::new(-(k2 as f64) / norm * amp, 0.0),
        Complex::new(k1 as f64 / norm * amp, 0.0),
    );
    f
}

/// Desk-scale problem shared by the scaling stages: K = 16, T = 0.5,
/// 500 steps, linear forcing at 0.2, two projection channels at (0.3, 0.2).
struct DeskProblem {
    grid: Grid64,
    tg: TimeGrid<f64>,
    coeffs: CoefficientSet<f64>,
    base: FrozenBase<f64>,
}

fn desk_problem() -> DeskProblem {
    let grid = Grid64::new(16, 1.0, 0.1).unwrap();
    let tg = TimeGrid::new(0.5, 500).unwrap();
    let coeffs = CoefficientSet::new(
        Arc::new(LinearF::new(0.2)),
        Arc::new(ProjectionG::new(&grid, vec![0.3, 0.2], 7)),
    );
    let initial = dealias(&grid, &random_field(&grid, 11, 1.5).unwrap());
    let zero = NoisePath::zeros(coeffs.channels(), tg.n_steps());
    let traj =
        solve_spde(&grid, &coeffs, &tg, &initial, 0.0, &zero, RecordPolicy::EveryNode).unwrap();
    let base = FrozenBase::new(&grid, &traj).unwrap();
    DeskProblem { grid, tg, coeffs, base }
}

struct Verdict {
    name: &'static str,
    pass: bool,
    detail: String,
}

/// Run one stage, enforce its wall budget, and print the verdict line.
fn stage(
    verdicts: &mut Vec<Verdict>,
    name: &'static str,
    budget_secs: Option<f64>,
    run: impl FnOnce() -> Result<String, String>,
) {
    let start = Instant::now();
    let outcome = run();
    let seconds = start.elapsed().as_secs_f64();
    let (mut pass, mut detail) = match outcome {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    if let Some(budget) = budget_secs {
        let allowed = budget * budget_scale();
        if seconds > allowed {
            pass = false;
            detail = format!("{detail}; over budget: {seconds:.1}s > {allowed:.0}s");
        }
    }
    let tag = if pass { "pass" } else { "FAIL" };
    println!("[{tag}] {name} ({seconds:.1}s) - {detail}");
    verdicts.push(Verdict { name, pass, detail });
}

/// Exact structural identities of the spatial operators on random fields:
/// V-orthogonality and antisymmetry of the transport term, the vanishing
/// trilinear form, the potential-vorticity norm expansion, Leray projection
/// idempotency and self-adjointness, the per-mode eigenvalue relation, and
/// the Poincare sandwich, each at K in {8, 16} on 50 fields.
fn operator_identities() -> Result<String, String> {
    let mut worst_headroom = 0.0f64;
    for k_max in [8u32, 16] {
        let grid = Grid64::new(k_max, 1.0, 0.1).map_err(|e| e.to_string())?;
        let checks = operator_identity_suite(&grid, 50, 2026).map_err(|e| e.to_string())?;
        for c in &checks {
            if !c.pass {
                return Err(format!(
                    "{} at K={k_max}: worst {:.3e} exceeds {:.0e}",
                    c.name, c.worst, c.tolerance
                ));
            }
            worst_headroom = worst_headroom.max(c.worst / c.tolerance);
        }
    }
    Ok(format!(
        "7 identities, 50 fields, K in {{8,16}}; worst error at {:.1e} of its tolerance",
        worst_headroom
    ))
}

/// The pseudospectral transport term against the O(K^4) direct convolution
/// sum on K = 4: 20 random pairs, 1e-12 relative.
fn transport_oracle() -> Result<String, String> {
    let grid = Grid64::new(4, 1.0, 0.1).map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for seed in 0..20u64 {
        let u = random_field(&grid, 2 * seed, 2.0).map_err(|e| e.to_string())?;
        let v = random_field(&grid, 2 * seed + 1, 2.0).map_err(|e| e.to_string())?;
        let err = max_relative_mode_error(&b_hat_convolution_oracle(&grid, &u, &v), &b_hat(&grid, &u, &v));
        worst = worst.max(err);
    }
    if worst <= 1e-12 {
        Ok(format!("20 random pairs at K=4; max relative deviation {worst:.2e} <= 1e-12"))
    } else {
        Err(format!("max relative deviation {worst:.2e} exceeds 1e-12"))
    }
}

/// Integrator accuracy: a single divergence-free mode decays along the exact
/// exponential (error <= 1e-6 at dt = 1e-3), and the two-stage scheme
/// self-converges at order 2.0 +/- 0.2 on a genuinely nonlinear problem.
fn integrator_accuracy() -> Result<String, String> {
    // Exact decay: transport vanishes on one conjugate pair and kappa = 0
    // kills the forcing, so u(t) = exp(-nu |k|^2 t / (1 + alpha |k|^2)) u(0).
    let grid = Grid64::new(8, 1.0, 0.1).map_err(|e| e.to_string())?;
    let set = CoefficientSet::new(
        Arc::new(LinearF::new(0.0)),
        Arc::new(DiagonalG::new(vec![0.0])),
    );
    let tg = TimeGrid::new(0.5, 500).map_err(|e| e.to_string())?; // dt = 1e-3
    let (k1, k2) = (2, 1);
    let u0 = mode_field(&grid, k1, k2, 0.7);
    let traj = solve_deterministic(&grid, &set, &tg, &u0, RecordPolicy::EveryNode)
        .map_err(|e| e.to_string())?;
    let ksq = (k1 * k1 + k2 * k2) as f64;
    let rate = grid.nu() * ksq / (1.0 + grid.alpha() * ksq);
    let mut decay_err = 0.0f64;
    for node in 0..=tg.n_steps() {
        let mut exact = u0.clone();
        exact.scale((-rate * tg.node_time(node)).exp());
        exact.axpy(-1.0, traj.field_at(node).expect("every node recorded"));
        decay_err = decay_err.max(exact.max_abs());
    }
    if decay_err > 1e-6 {
        return Err(format!("single-mode decay error {decay_err:.2e} exceeds 1e-6"));
    }

    // Self-convergence under dt -> dt/2 -> dt/4 on saturating forcing.
    let set = CoefficientSet::new(
        Arc::new(SaturatingF::new(0.4)),
        Arc::new(DiagonalG::new(vec![0.0])),
    );
    let u0 = dealias(&grid, &random_field(&grid, 11, 4.0).map_err(|e| e.to_string())?);
    let terminal = |n_steps: usize| -> Result<Field64, String> {
        let tg = TimeGrid::new(0.25, n_steps).map_err(|e| e.to_string())?;
        Ok(solve_deterministic(&grid, &set, &tg, &u0, RecordPolicy::NormsOnly)
            .map_err(|e| e.to_string())?
            .final_field()
            .clone())
    };
    let coarse = terminal(50)?;
    let mid = terminal(100)?;
    let fine = terminal(200)?;
    let mut d1 = coarse;
    d1.axpy(-1.0, &mid);
    let mut d2 = mid.clone();
    d2.axpy(-1.0, &fine);
    let order = (grid.norm_v(&d1) / grid.norm_v(&d2)).log2();
    if (order - 2.0).abs() > 0.2 {
        return Err(format!("self-convergence order {order:.3} outside 2.0 +/- 0.2"));
    }
    Ok(format!(
        "single-mode decay error {decay_err:.1e} <= 1e-6; self-convergence order {order:.2}"
    ))
}

/// Primal gap scaling: the slope of log E[sup |u^eps - u0|_V^2] against
/// log eps over five intensities must sit at 1.0 +/- 0.15 (exponent p/2
/// with p = 2), with n = 200 samples per intensity.
fn clt_gap_slope(desk: &DeskProblem) -> Result<String, String> {
    let ens = Ensemble::new(&desk.grid, &desk.coeffs, &desk.tg, &desk.base, 200, 42)
        .map_err(|e| e.to_string())?;
    let report =
        primal_gap_experiment(&ens, &intensity_grid(), &[2.0]).map_err(|e| e.to_string())?;
    let slope = report.fit.slope;
    if (slope - 1.0).abs() <= 0.15 {
        Ok(format!(
            "slope {slope:.3} within 1.0 +/- 0.15 (r2 {:.4}, n=200 per intensity)",
            report.fit.r2
        ))
    } else {
        Err(format!("slope {slope:.3} outside 1.0 +/- 0.15 (r2 {:.4})", report.fit.r2))
    }
}

/// Fluctuation convergence: E[sup |(u^eps - u0)/sqrt(eps) - V0|_V^2] must
/// decrease strictly along the intensity grid with fitted slope >= 0.4
/// (the sqrt(eps)-dominated bound).
fn clt_limit_decay(desk: &DeskProblem) -> Result<String, String> {
    let ens = Ensemble::new(&desk.grid, &desk.coeffs, &desk.tg, &desk.base, 200, 42)
        .map_err(|e| e.to_string())?;
    let report =
        clt_limit_experiment(&ens, &intensity_grid(), &[2.0]).map_err(|e| e.to_string())?;
    let slope = report.fit.slope;
    let first = report.table.rows.first().map(|r| r.mean).unwrap_or(f64::NAN);
    let last = report.table.rows.last().map(|r| r.mean).unwrap_or(f64::NAN);
    if report.strictly_decreasing && slope >= 0.4 {
        Ok(format!(
            "strictly decreasing ({first:.3e} -> {last:.3e}), slope {slope:.3} >= 0.4"
        ))
    } else {
        Err(format!(
            "strictly_decreasing={}, slope {slope:.3} (need decreasing and >= 0.4)",
            report.strictly_decreasing
        ))
    }
}

/// Controlled-deviation continuity: with h fixed in the level set S_4 and
/// h^eps = h + eps^(1/4) g, the mean sup-distance between X^{h^eps} and the
/// frozen skeleton image of h must decrease strictly over
/// eps in {1e-2, 1e-3, 1e-4} and end at <= 25% of its first value.
fn controlled_convergence(desk: &DeskProblem) -> Result<String, String> {
    let ens = Ensemble::new(&desk.grid, &desk.coeffs, &desk.tg, &desk.base, 200, 42)
        .map_err(|e| e.to_string())?;
    let m = desk.coeffs.channels();
    let h = Control::smooth_random(21, m, &desk.tg, 0.1);
    let g = Control::smooth_random(22, m, &desk.tg, 0.01);
    let report = mdp_condition_a_experiment(&ens, &h, &g, 0.4, 4.0, &[1e-2, 1e-3, 1e-4])
        .map_err(|e| e.to_string())?;
    let ratio = report.final_over_initial;
    if report.strictly_decreasing && ratio <= 0.25 {
        Ok(format!(
            "strictly decreasing, final/initial {ratio:.3} <= 0.25 (n=200 per intensity)"
        ))
    } else {
        Err(format!(
            "strictly_decreasing={}, final/initial {ratio:.3} (need decreasing and <= 0.25)",
            report.strictly_decreasing
        ))
    }
}

/// Uniform W-moment audit: second moments of sup |X^{h^eps}|_W for a fixed
/// control driven across the whole intensity grid must agree within a
/// factor of three between the extreme intensities.
fn uniform_w_audit(desk: &DeskProblem) -> Result<String, String> {
    let ens = Ensemble::new(&desk.grid, &desk.coeffs, &desk.tg, &desk.base, 200, 42)
        .map_err(|e| e.to_string())?;
    let m = desk.coeffs.channels();
    let h = Control::smooth_random(21, m, &desk.tg, 3.5);
    let g = Control::smooth_random(22, m, &desk.tg, 0.01);
    let report = uniform_bound_audit(&ens, &h, &g, 0.4, 4.0, &intensity_grid(), 2.0)
        .map_err(|e| e.to_string())?;
    let ratio = report.ratio_extremes;
    if report.pass {
        Ok(format!(
            "extreme-intensity ratio {ratio:.3} inside [1/3, 3] (max mean {:.3e}, n=200)",
            report.max_mean
        ))
    } else {
        Err(format!("extreme-intensity ratio {ratio:.3} outside [1/3, 3]"))
    }
}

/// Minimum-energy solver: adjoint gradients against central differences,
/// round-trip recovery of a known minimal control, quadratic scaling of the
/// rate in the target, and the infinite verdict on an unreachable target.
fn rate_function_suite() -> Result<String, String> {
    let grid = Grid64::new(8, 1.0, 0.1).map_err(|e| e.to_string())?;
    let tg = TimeGrid::new(0.5, 120).map_err(|e| e.to_string())?;
    let coeffs = CoefficientSet::new(
        Arc::new(LinearF::new(0.2)),
        Arc::new(ProjectionG::new(&grid, vec![0.3, 0.2], 7)),
    );
    let initial = dealias(&grid, &random_field(&grid, 11, 1.5).map_err(|e| e.to_string())?);
    let zero = NoisePath::zeros(coeffs.channels(), tg.n_steps());
    let traj = solve_spde(&grid, &coeffs, &tg, &initial, 0.0, &zero, RecordPolicy::EveryNode)
        .map_err(|e| e.to_string())?;
    let base = FrozenBase::new(&grid, &traj).map_err(|e| e.to_string())?;
    let map = SkeletonMap::new(&grid, &coeffs, tg.clone(), &base).map_err(|e| e.to_string())?;

    // Adjoint gradient against central differences. The terminal misfit is
    // quadratic in the control, so delta = 1/8 carries no truncation error.
    let target = TargetSpec::Terminal(dealias(
        &grid,
        &random_field(&grid, 17, 1.5).map_err(|e| e.to_string())?,
    ));
    let h = Control::smooth_random(3, coeffs.channels(), &tg, 0.5);
    let report = map.adjoint_gradient(&target, &h).map_err(|e| e.to_string())?;
    let delta = 0.125;
    let mut fd_worst = 0.0f64;
    for seed in 0..6u64 {
        let dir = Control::smooth_random(100 + seed, coeffs.channels(), &tg, 1.0);
        let predicted = control_inner(&tg, &report.gradient, &dir);
        let mut plus = h.clone();
        plus.add_scaled(delta, &dir);
        let mut minus = h.clone();
        minus.add_scaled(-delta, &dir);
        let jp = map.adjoint_gradient(&target, &plus).map_err(|e| e.to_string())?.value;
        let jm = map.adjoint_gradient(&target, &minus).map_err(|e| e.to_string())?.value;
        let fd = (jp - jm) / (2.0 * delta);
        let rel = (fd - predicted).abs() / predicted.abs().max(1e-12);
        fd_worst = fd_worst.max(rel);
    }
    if fd_worst > 1e-6 {
        return Err(format!("gradient vs central differences: worst {fd_worst:.2e} > 1e-6"));
    }

    // Round trip: a target manufactured as L(adjoint image) has that image
    // as its minimum-energy preimage, so the rate must come back as its
    // energy and the residual must be negligible against the target size.
    let z = dealias(&grid, &random_field(&grid, 41, 1.5).map_err(|e| e.to_string())?);
    let h_star = map.adjoint_terminal(&z);
    let energy = h_star.energy(&tg);
    let x_t = map.forward_terminal(&h_star).map_err(|e| e.to_string())?;
    let result = map
        .min_norm_control(&TargetSpec::Terminal(x_t.clone()), 1e-10, 500)
        .map_err(|e| e.to_string())?;
    let residual_cap = 1e-8 * grid.norm_v(&x_t).max(1.0);
    if !result.reachable || result.residual > residual_cap {
        return Err(format!(
            "round trip: reachable={}, residual {:.2e} > {residual_cap:.2e}",
            result.reachable, result.residual
        ));
    }
    let rate_err = (result.value - energy).abs() / energy;
    if rate_err > 1e-6 {
        return Err(format!("round-trip rate off by {rate_err:.2e} relative"));
    }

    // Quadratic scaling: I(c x) = c^2 I(x) to 1e-8 relative.
    let base_rate = map
        .rate_value(&TargetSpec::Terminal(x_t.clone()), 1e-10)
        .map_err(|e| e.to_string())?;
    let mut scaling_worst = 0.0f64;
    for c in [2.0, 5.0] {
        let mut scaled = x_t.clone();
        scaled.scale(c);
        let rate_c = map
            .rate_value(&TargetSpec::Terminal(scaled), 1e-10)
            .map_err(|e| e.to_string())?;
        scaling_worst = scaling_worst.max((rate_c - c * c * base_rate).abs() / (c * c * base_rate));
    }
    if scaling_worst > 1e-8 {
        return Err(format!("quadratic scaling off by {scaling_worst:.2e} > 1e-8"));
    }

    // Unreachable target: a single constant channel on one wavevector over a
    // rest base spans only that mode, so any other mode gets the infinite
    // verdict (the empty-infimum convention).
    let narrow = CoefficientSet::new(
        Arc::new(LinearF::new(0.2)),
        Arc::new(ConstantG::new(vec![mode_field(&grid, 1, 0, 1.0)])),
    );
    let rest = FrozenBase::rest_state(&grid, tg.n_nodes());
    let narrow_map =
        SkeletonMap::new(&grid, &narrow, tg.clone(), &rest).map_err(|e| e.to_string())?;
    let off_span = mode_field(&grid, 2, 1, 1.0);
    let verdict = narrow_map
        .min_norm_control(&TargetSpec::Terminal(off_span), 1e-8, 500)
        .map_err(|e| e.to_string())?;
    if verdict.reachable || !verdict.value.is_infinite() {
        return Err(format!(
            "unreachable target: reachable={}, value={}",
            verdict.reachable, verdict.value
        ));
    }

    Ok(format!(
        "gradient vs differences {fd_worst:.1e}; round-trip residual {:.1e}, rate to {rate_err:.1e}; \
         quadratic scaling to {scaling_worst:.1e}; unreachable verdict +inf",
        result.residual
    ))
}

/// Determinism of the shipped binary: a clt-gap run repeated with an
/// identical config must produce byte-identical artifacts under 1, 2, and
/// 8 workers.
fn binary_determinism() -> Result<String, String> {
    let bin = env!("CARGO_BIN_EXE_g2");
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let config_path = dir.path().join("run.toml");
    fs::write(
        &config_path,
        "[grid]\nk_max = 8\n\n[time]\nsteps = 100\n\n[ensemble]\nsamples = 24\nepsilons = [1e-2, 1e-3, 1e-4]\n",
    )
    .map_err(|e| e.to_string())?;

    let workers = ["1", "2", "8"];
    let mut codes = Vec::new();
    for w in workers {
        let out = dir.path().join(format!("w{w}"));
        let output = Process::new(bin)
            .args(["clt-gap", "--config"])
            .arg(&config_path)
            .arg("--out")
            .arg(&out)
            .env("G2_THREADS", w)
            .output()
            .map_err(|e| e.to_string())?;
        let code = output.status.code();
        if !matches!(code, Some(0) | Some(1)) {
            return Err(format!(
                "workers={w}: exit {code:?}, stderr: {}",
                String::from_utf8_lossy(&output.stderr)
            ));
        }
        codes.push(code);
    }
    if codes.windows(2).any(|c| c[0] != c[1]) {
        return Err(format!("exit codes differ across worker counts: {codes:?}"));
    }

    let names = ["gap_moments.csv", "gap_slope.json", "manifest.json"];
    for name in names {
        let reference = fs::read(dir.path().join("w1").join(name)).map_err(|e| e.to_string())?;
        for w in &workers[1..] {
            let candidate =
                fs::read(dir.path().join(format!("w{w}")).join(name)).map_err(|e| e.to_string())?;
            if candidate != reference {
                return Err(format!("{name} differs between 1 and {w} workers"));
            }
        }
    }
    Ok(format!(
        "1/2/8 workers: {} byte-identical, exit {:?}",
        names.join(", "),
        codes[0].unwrap_or(-1)
    ))
}

#[test]
fn acceptance_gate() {
    let mut verdicts = Vec::new();

    stage(&mut verdicts, "operator-identities", Some(30.0), operator_identities);
    stage(&mut verdicts, "transport-oracle", Some(10.0), transport_oracle);
    stage(&mut verdicts, "integrator-accuracy", None, integrator_accuracy);

    let desk = desk_problem();
    stage(&mut verdicts, "clt-gap-slope", Some(600.0), || clt_gap_slope(&desk));
    stage(&mut verdicts, "clt-limit-decay", Some(600.0), || clt_limit_decay(&desk));
    stage(&mut verdicts, "controlled-convergence", Some(600.0), || {
        controlled_convergence(&desk)
    });
    stage(&mut verdicts, "uniform-w-audit", None, || uniform_w_audit(&desk));
    stage(&mut verdicts, "rate-function", Some(120.0), rate_function_suite);
    stage(&mut verdicts, "binary-determinism", None, binary_determinism);

    let failed: Vec<_> = verdicts.iter().filter(|v| !v.pass).collect();
    println!(
        "acceptance: {}/{} stages passed",
        verdicts.len() - failed.len(),
        verdicts.len()
    );
    assert!(
        failed.is_empty(),
        "failed stages: {}",
        failed
            .iter()
            .map(|v| format!("{} ({})", v.name, v.detail))
            .collect::<Vec<_>>()
            .join("; ")
    );
}
