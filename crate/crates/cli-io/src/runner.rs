//! Command dispatch: each subcommand builds its problem from the parsed
//! configuration, runs the named experiment, writes artifacts plus a
//! manifest, and reports a gate verdict.
//!
//! Exit semantics: a command that completes and meets its acceptance gate
//! succeeds; one that completes but misses the gate fails with the gate
//! error; configuration problems surface before any heavy work; numerical
//! blow-up aborts with its own code.  Unreachable rate targets are a
//! *valid answer* — the run succeeds and the report says `reachable:
//! false`.

use std::path::Path;

use asymptotics::{
    clt_limit_experiment, mdp_condition_a_experiment, primal_gap_experiment, uniform_bound_audit,
    AuditReport, ConditionAReport, Ensemble, ScalingReport,
};
use dynamics::{
    brownian_path, sample_seed, solve_spde, Control, FrozenBase, NoisePath, RecordPolicy,
    TimeGrid, Trajectory,
};
use rate_function::{SkeletonMap, TargetSpec};
use serde::Serialize;
use spectral_core::{dealias, random_field, read_g2sf, Field64, Grid64};

use crate::artifacts::{fmt_f64, Manifest, OutputWriter};
use crate::config::RunConfig;
use crate::error::CliError;
use crate::selftest::operator_identity_suite;

/// The six subcommands.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Selftest,
    Simulate,
    CltGap,
    CltLimit,
    MdpCheck,
    Rate,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Selftest => "selftest",
            Command::Simulate => "simulate",
            Command::CltGap => "clt-gap",
            Command::CltLimit => "clt-limit",
            Command::MdpCheck => "mdp-check",
            Command::Rate => "rate",
        }
    }
}

/// What a finished command hands back to the process shell.
#[derive(Debug)]
pub struct RunOutcome {
    pub manifest: Manifest,
    /// One-line human summary, printed on stdout.
    pub summary: String,
}

/// Shared problem setup derived from the configuration.
struct Setup {
    grid: Grid64,
    tg: TimeGrid<f64>,
    coeffs: coefficients::CoefficientSet<f64>,
    initial: Field64,
}

fn setup(config: &RunConfig) -> Result<Setup, CliError> {
    let grid = config.build_grid()?;
    let tg = config.build_time_grid()?;
    let coeffs = config.build_coefficients(&grid);
    let initial = config.build_initial(&grid)?;
    Ok(Setup {
        grid,
        tg,
        coeffs,
        initial,
    })
}

/// The deterministic base path, integrated by the same one-step recursion
/// the stochastic solver uses at zero intensity, recorded at every node so
/// coupled differences against it cancel exactly.
fn deterministic_base(s: &Setup) -> Result<FrozenBase<f64>, CliError> {
    let zero = NoisePath::zeros(s.coeffs.channels(), s.tg.n_steps());
    let traj = solve_spde(
        &s.grid,
        &s.coeffs,
        &s.tg,
        &s.initial,
        0.0,
        &zero,
        RecordPolicy::EveryNode,
    )?;
    Ok(FrozenBase::new(&s.grid, &traj)?)
}

/// Run one command against a parsed configuration.  Artifacts land under
/// `config.output_dir`; the manifest is written even when the gate fails,
/// so a failed run can still be inspected.
pub fn run_command(cmd: Command, config: &RunConfig) -> Result<RunOutcome, CliError> {
    let mut out = OutputWriter::create(&config.output_dir)?;
    let verdict = match cmd {
        Command::Selftest => run_selftest(config, &mut out),
        Command::Simulate => run_simulate(config, &mut out),
        Command::CltGap => run_clt_gap(config, &mut out),
        Command::CltLimit => run_clt_limit(config, &mut out),
        Command::MdpCheck => run_mdp_check(config, &mut out),
        Command::Rate => run_rate(config, &mut out),
    };
    match verdict {
        Ok(summary) => {
            let manifest = out.finish(cmd.name(), config)?;
            Ok(RunOutcome { manifest, summary })
        }
        Err(CliError::Gate(msg)) => {
            // The run completed; keep its artifacts inspectable.
            out.finish(cmd.name(), config)?;
            Err(CliError::Gate(msg))
        }
        Err(other) => Err(other),
    }
}

// ---------------------------------------------------------------------
// selftest
// ---------------------------------------------------------------------

#[derive(Serialize)]
struct CheckReport {
    name: String,
    k_max: u32,
    worst: f64,
    tolerance: f64,
    pass: bool,
}

/// Number of random fields the identity suite draws per grid.
pub const SELFTEST_FIELDS: usize = 50;

fn run_selftest(config: &RunConfig, out: &mut OutputWriter) -> Result<String, CliError> {
    let grid = config.build_grid()?;
    let checks = operator_identity_suite(&grid, SELFTEST_FIELDS, config.ensemble.root_seed)?;
    for c in &checks {
        println!("{}", c.render());
    }
    let report: Vec<CheckReport> = checks
        .iter()
        .map(|c| CheckReport {
            name: c.name.to_string(),
            k_max: c.k_max,
            worst: c.worst,
            tolerance: c.tolerance,
            pass: c.pass,
        })
        .collect();
    out.write_json("selftest.json", &report)?;
    let failed: Vec<&str> = checks.iter().filter(|c| !c.pass).map(|c| c.name).collect();
    if failed.is_empty() {
        Ok(format!(
            "selftest: {} identities hold on {} random fields at K={}",
            checks.len(),
            SELFTEST_FIELDS,
            config.grid.k_max
        ))
    } else {
        Err(CliError::Gate(format!(
            "operator identities failed: {}",
            failed.join(", ")
        )))
    }
}

// ---------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------

#[derive(Serialize)]
struct PathSummary {
    sup_norm_v: f64,
    sup_norm_w: f64,
    final_norm_v: f64,
}

#[derive(Serialize)]
struct SimulateReport {
    epsilon: f64,
    sample_seed: u64,
    deterministic: PathSummary,
    sample: PathSummary,
}

fn summarize(traj: &Trajectory<f64>) -> PathSummary {
    PathSummary {
        sup_norm_v: traj.sup_norm_v(),
        sup_norm_w: traj.sup_norm_w(),
        final_norm_v: *traj.norm_v.last().expect("a trajectory has at least one node"),
    }
}

fn trajectory_rows(traj: &Trajectory<f64>) -> Vec<Vec<String>> {
    (0..traj.times.len())
        .map(|n| {
            vec![
                n.to_string(),
                fmt_f64(traj.times[n]),
                fmt_f64(traj.norm_v[n]),
                fmt_f64(traj.norm_w[n]),
            ]
        })
        .collect()
}

const TRAJECTORY_HEADER: [&str; 4] = ["step", "time", "norm_V", "norm_W"];

fn run_simulate(config: &RunConfig, out: &mut OutputWriter) -> Result<String, CliError> {
    let s = setup(config)?;
    let zero = NoisePath::zeros(s.coeffs.channels(), s.tg.n_steps());
    let det = solve_spde(
        &s.grid,
        &s.coeffs,
        &s.tg,
        &s.initial,
        0.0,
        &zero,
        RecordPolicy::NormsOnly,
    )?;
    let seed = sample_seed(config.ensemble.root_seed, 0);
    let noise = brownian_path(seed, s.coeffs.channels(), &s.tg);
    let sample = solve_spde(
        &s.grid,
        &s.coeffs,
        &s.tg,
        &s.initial,
        config.simulate.epsilon,
        &noise,
        RecordPolicy::NormsOnly,
    )?;

    out.write_csv("deterministic.csv", &TRAJECTORY_HEADER, trajectory_rows(&det))?;
    out.write_csv("sample.csv", &TRAJECTORY_HEADER, trajectory_rows(&sample))?;
    if config.simulate.snapshots {
        out.write_snapshot("initial.g2sf", &s.initial)?;
        out.write_snapshot("deterministic_final.g2sf", det.final_field())?;
        out.write_snapshot("sample_final.g2sf", sample.final_field())?;
    }
    let report = SimulateReport {
        epsilon: config.simulate.epsilon,
        sample_seed: seed,
        deterministic: summarize(&det),
        sample: summarize(&sample),
    };
    out.write_json("simulate.json", &report)?;
    Ok(format!(
        "simulate: {} steps to T={}, sup|u^eps|_V = {:.6}",
        config.time.steps,
        config.time.horizon,
        report.sample.sup_norm_v
    ))
}

// ---------------------------------------------------------------------
// scaling experiments (clt-gap, clt-limit)
// ---------------------------------------------------------------------

#[derive(Serialize)]
struct SlopeReport {
    quantity: String,
    p: f64,
    slope: f64,
    intercept: f64,
    r2: f64,
    pass: bool,
}

const MOMENT_HEADER: [&str; 5] = ["epsilon", "p", "n", "mean", "stderr"];

fn moment_rows(report: &ScalingReport<f64>) -> Vec<Vec<String>> {
    report
        .table
        .rows
        .iter()
        .map(|r| {
            vec![
                fmt_f64(r.epsilon),
                fmt_f64(r.p),
                r.n.to_string(),
                fmt_f64(r.mean),
                fmt_f64(r.stderr),
            ]
        })
        .collect()
}

/// Relative half-width of the acceptance band around the theoretical
/// scaling exponent `p/2` for the primal gap.
pub const GAP_SLOPE_BAND: f64 = 0.15;
/// Minimal fitted decay exponent accepted for the centered fluctuation.
pub const LIMIT_SLOPE_FLOOR: f64 = 0.4;

fn require_slope_grid(config: &RunConfig) -> Result<(), CliError> {
    if config.ensemble.epsilons.len() < 3 {
        return Err(CliError::Config(format!(
            "a scaling fit needs at least 3 intensities, got {}",
            config.ensemble.epsilons.len()
        )));
    }
    Ok(())
}

fn run_clt_gap(config: &RunConfig, out: &mut OutputWriter) -> Result<String, CliError> {
    require_slope_grid(config)?;
    let s = setup(config)?;
    let base = deterministic_base(&s)?;
    let ens = Ensemble::new(
        &s.grid,
        &s.coeffs,
        &s.tg,
        &base,
        config.ensemble.samples,
        config.ensemble.root_seed,
    )?;
    let report = primal_gap_experiment(&ens, &config.ensemble.epsilons, &config.ensemble.orders)?;
    out.write_csv("gap_moments.csv", &MOMENT_HEADER, moment_rows(&report))?;
    let p = config.ensemble.orders[0];
    let expected = p / 2.0;
    let pass = (report.fit.slope - expected).abs() <= GAP_SLOPE_BAND * expected;
    out.write_json(
        "gap_slope.json",
        &SlopeReport {
            quantity: report.table.quantity.to_string(),
            p,
            slope: report.fit.slope,
            intercept: report.fit.intercept,
            r2: report.fit.r2,
            pass,
        },
    )?;
    if pass {
        Ok(format!(
            "clt-gap: slope {:.4} within {} of {expected}",
            report.fit.slope, GAP_SLOPE_BAND
        ))
    } else {
        Err(CliError::Gate(format!(
            "primal-gap slope {:.4} outside {expected} ± {:.0}%",
            report.fit.slope,
            100.0 * GAP_SLOPE_BAND
        )))
    }
}

fn run_clt_limit(config: &RunConfig, out: &mut OutputWriter) -> Result<String, CliError> {
    require_slope_grid(config)?;
    let s = setup(config)?;
    let base = deterministic_base(&s)?;
    let ens = Ensemble::new(
        &s.grid,
        &s.coeffs,
        &s.tg,
        &base,
        config.ensemble.samples,
        config.ensemble.root_seed,
    )?;
    let report = clt_limit_experiment(&ens, &config.ensemble.epsilons, &config.ensemble.orders)?;
    out.write_csv("limit_moments.csv", &MOMENT_HEADER, moment_rows(&report))?;
    let pass = report.strictly_decreasing && report.fit.slope >= LIMIT_SLOPE_FLOOR;
    out.write_json(
        "limit_slope.json",
        &SlopeReport {
            quantity: report.table.quantity.to_string(),
            p: config.ensemble.orders[0],
            slope: report.fit.slope,
            intercept: report.fit.intercept,
            r2: report.fit.r2,
            pass,
        },
    )?;
    if pass {
        Ok(format!(
            "clt-limit: strictly decreasing, slope {:.4} >= {LIMIT_SLOPE_FLOOR}",
            report.fit.slope
        ))
    } else {
        Err(CliError::Gate(format!(
            "centered fluctuation: decreasing={}, slope {:.4} (floor {LIMIT_SLOPE_FLOOR})",
            report.strictly_decreasing, report.fit.slope
        )))
    }
}

// ---------------------------------------------------------------------
// mdp-check
// ---------------------------------------------------------------------

#[derive(Serialize)]
struct ConditionAJson {
    strictly_decreasing: bool,
    final_over_initial: f64,
    pass: bool,
}

#[derive(Serialize)]
struct AuditJson {
    max_mean: f64,
    ratio_extremes: f64,
    band: f64,
    pass: bool,
}

#[derive(Serialize)]
struct MdpReport {
    condition_a: ConditionAJson,
    audit: AuditJson,
    pass: bool,
}

/// Largest admissible value of `final_over_initial` for the continuity
/// check: the distance to the skeleton image must fall to a quarter of
/// its initial value across the intensity sweep.
pub const CONDITION_A_DECAY: f64 = 0.25;

const DISTANCE_HEADER: [&str; 5] = ["epsilon", "lambda", "n", "mean", "stderr"];

fn distance_rows(report: &ConditionAReport<f64>) -> Vec<Vec<String>> {
    report
        .rows
        .iter()
        .map(|r| {
            vec![
                fmt_f64(r.epsilon),
                fmt_f64(r.lambda),
                r.n.to_string(),
                fmt_f64(r.mean),
                fmt_f64(r.stderr),
            ]
        })
        .collect()
}

fn audit_rows(report: &AuditReport<f64>) -> Vec<Vec<String>> {
    report
        .rows
        .iter()
        .map(|r| {
            vec![
                fmt_f64(r.epsilon),
                fmt_f64(r.lambda),
                r.n.to_string(),
                fmt_f64(r.mean),
                fmt_f64(r.stderr),
            ]
        })
        .collect()
}

/// Read a control derivative table (columns: step, channel, hdot); every
/// (step, channel) pair must appear exactly once.
pub fn read_control_csv(
    path: &Path,
    channels: usize,
    n_steps: usize,
) -> Result<Control<f64>, CliError> {
    let mut reader = csv::Reader::from_path(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let mut hdot = vec![f64::NAN; channels * n_steps];
    let mut seen = vec![false; channels * n_steps];
    for record in reader.records() {
        let record = record
            .map_err(|e| CliError::Config(format!("malformed row in {}: {e}", path.display())))?;
        if record.len() != 3 {
            return Err(CliError::Config(format!(
                "{}: expected 3 columns (step, channel, hdot), got {}",
                path.display(),
                record.len()
            )));
        }
        let step: usize = record[0]
            .parse()
            .map_err(|_| CliError::Config(format!("{}: bad step {:?}", path.display(), &record[0])))?;
        let channel: usize = record[1].parse().map_err(|_| {
            CliError::Config(format!("{}: bad channel {:?}", path.display(), &record[1]))
        })?;
        let value: f64 = record[2].parse().map_err(|_| {
            CliError::Config(format!("{}: bad value {:?}", path.display(), &record[2]))
        })?;
        if step >= n_steps || channel >= channels {
            return Err(CliError::Config(format!(
                "{}: (step {step}, channel {channel}) outside {} steps x {} channels",
                path.display(),
                n_steps,
                channels
            )));
        }
        let idx = step * channels + channel;
        if seen[idx] {
            return Err(CliError::Config(format!(
                "{}: duplicate entry for step {step}, channel {channel}",
                path.display()
            )));
        }
        seen[idx] = true;
        hdot[idx] = value;
    }
    if !seen.iter().all(|&s| s) {
        return Err(CliError::Config(format!(
            "{}: control table incomplete; every (step, channel) pair up to {} x {} is required",
            path.display(),
            n_steps,
            channels
        )));
    }
    Ok(Control::from_values(channels, n_steps, hdot))
}

fn run_mdp_check(config: &RunConfig, out: &mut OutputWriter) -> Result<String, CliError> {
    if config.ensemble.epsilons.len() < 2 {
        return Err(CliError::Config(format!(
            "the deviation checks need at least 2 intensities, got {}",
            config.ensemble.epsilons.len()
        )));
    }
    let s = setup(config)?;
    let base = deterministic_base(&s)?;
    let m = s.coeffs.channels();
    let mdp = &config.mdp;

    let h = match &mdp.control_csv {
        Some(path) => read_control_csv(path, m, s.tg.n_steps())?,
        None => Control::smooth_random(mdp.control_seed, m, &s.tg, mdp.control_action),
    };
    let g = Control::smooth_random(mdp.perturbation_seed, m, &s.tg, mdp.perturbation_action);

    let ens = Ensemble::new(
        &s.grid,
        &s.coeffs,
        &s.tg,
        &base,
        config.ensemble.samples,
        config.ensemble.root_seed,
    )?;
    let condition_a = mdp_condition_a_experiment(
        &ens,
        &h,
        &g,
        config.ensemble.gamma,
        mdp.level,
        &config.ensemble.epsilons,
    )?;
    out.write_csv("condition_a.csv", &DISTANCE_HEADER, distance_rows(&condition_a))?;

    // The audit drives a control sized so the controlled response, not the
    // vanishing residual noise, dominates the W-moment.
    let h_audit = Control::smooth_random(mdp.control_seed, m, &s.tg, mdp.audit_action);
    let ens_audit = Ensemble::new(
        &s.grid,
        &s.coeffs,
        &s.tg,
        &base,
        mdp.audit_samples,
        config.ensemble.root_seed,
    )?;
    let audit = uniform_bound_audit(
        &ens_audit,
        &h_audit,
        &g,
        config.ensemble.gamma,
        mdp.level,
        &config.ensemble.epsilons,
        config.ensemble.orders[0],
    )?;
    out.write_csv("audit.csv", &DISTANCE_HEADER, audit_rows(&audit))?;

    let a_pass =
        condition_a.strictly_decreasing && condition_a.final_over_initial <= CONDITION_A_DECAY;
    let report = MdpReport {
        condition_a: ConditionAJson {
            strictly_decreasing: condition_a.strictly_decreasing,
            final_over_initial: condition_a.final_over_initial,
            pass: a_pass,
        },
        audit: AuditJson {
            max_mean: audit.max_mean,
            ratio_extremes: audit.ratio_extremes,
            band: asymptotics::AUDIT_BAND,
            pass: audit.pass,
        },
        pass: a_pass && audit.pass,
    };
    out.write_json("mdp_report.json", &report)?;
    if report.pass {
        Ok(format!(
            "mdp-check: distance ratio {:.4}, audit ratio {:.4}",
            condition_a.final_over_initial, audit.ratio_extremes
        ))
    } else {
        Err(CliError::Gate(format!(
            "mdp-check: condition (a) pass={} (decay {:.4}), audit pass={} (ratio {:.4})",
            a_pass, condition_a.final_over_initial, audit.pass, audit.ratio_extremes
        )))
    }
}

// ---------------------------------------------------------------------
// rate
// ---------------------------------------------------------------------

#[derive(Serialize)]
struct RateReport {
    /// Rate value; `null` encodes the infinite verdict for unreachable
    /// targets.
    #[serde(rename = "I")]
    i: Option<f64>,
    reachable: bool,
    residual: f64,
    iterations: usize,
    control_csv_path: String,
}

const CONTROL_HEADER: [&str; 3] = ["step", "channel", "hdot"];

fn control_rows(control: &Control<f64>) -> Vec<Vec<String>> {
    let mut rows = Vec::with_capacity(control.n_steps() * control.channels());
    for n in 0..control.n_steps() {
        for (j, v) in control.values(n).iter().enumerate() {
            rows.push(vec![n.to_string(), j.to_string(), fmt_f64(*v)]);
        }
    }
    rows
}

fn run_rate(config: &RunConfig, out: &mut OutputWriter) -> Result<String, CliError> {
    let s = setup(config)?;
    let base = deterministic_base(&s)?;
    let map = SkeletonMap::new(&s.grid, &s.coeffs, s.tg, &base)?;

    let target: Field64 = match &config.rate.target_snapshot {
        Some(path) => {
            let bytes = std::fs::read(path)
                .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
            let field = read_g2sf(&mut bytes.as_slice())?;
            if field.k_max() != s.grid.k_max() {
                return Err(CliError::Config(format!(
                    "target snapshot lives on K={} but the run uses K={}",
                    field.k_max(),
                    s.grid.k_max()
                )));
            }
            field
        }
        None => {
            // Self-generated reachable target: the forward image of the
            // adjoint lift of a random field, so the solve has a known
            // answer to recover.
            let z = dealias(
                &s.grid,
                &random_field(&s.grid, config.rate.target_seed, 1.5)?,
            );
            let h_star = map.adjoint_terminal(&z);
            map.forward_terminal(&h_star)?
        }
    };

    let result = map.min_norm_control(
        &TargetSpec::Terminal(target),
        config.rate.tolerance,
        config.rate.max_iterations,
    )?;

    out.write_csv("control.csv", &CONTROL_HEADER, control_rows(&result.control))?;
    let control_csv_path = out.dir().join("control.csv").display().to_string();
    let report = RateReport {
        i: result.value.is_finite().then_some(result.value),
        reachable: result.reachable,
        residual: result.residual,
        iterations: result.iterations,
        control_csv_path,
    };
    out.write_json("rate.json", &report)?;
    Ok(if result.reachable {
        format!(
            "rate: I = {:.6e} after {} iterations (residual {:.2e})",
            result.value, result.iterations, result.residual
        )
    } else {
        format!(
            "rate: target unreachable after {} iterations (residual {:.2e}); I = +inf",
            result.iterations, result.residual
        )
    })
}
