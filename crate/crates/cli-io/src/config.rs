//! Run configuration: sectioned key-value text, fully defaulted, strictly
//! validated.
//!
//! Every key has a default, so an empty file is a valid configuration and
//! describes the reference desk-scale setup (K = 16, T = 0.5, 500 steps,
//! linear forcing with gain 0.2, two projection noise channels at gains
//! 0.3 and 0.2, alpha = 1, nu = 0.1).  Unknown keys are hard errors so a
//! typo cannot silently fall back to a default.  Range violations are
//! reported with the line the offending value sits on; paths referenced by
//! a config must exist at parse time and are resolved relative to the
//! config file's directory.

use std::ops::Range;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use coefficients::{CoefficientSet, DiagonalG, LinearF, ProjectionG, SaturatingF};
use dynamics::TimeGrid;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use spectral_core::{dealias, random_field, Field64, Grid64};
use toml::Spanned;

use crate::error::CliError;

/// Hex SHA-256 of a byte string; the fingerprint recorded in manifests.
pub fn sha256_hex(bytes: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(bytes);
    let digest = h.finalize();
    let mut out = String::with_capacity(64);
    for b in digest {
        out.push_str(&format!("{b:02x}"));
    }
    out
}

/// Forcing nonlinearity selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ForcingKind {
    /// Bounded linear drift `-kappa * u`.
    Linear,
    /// Saturating drift `-kappa * u / (1 + |u|_V^2)^(1/2)`.
    Saturating,
}

/// Noise map selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseKind {
    /// State-dependent channels projected from fixed random shapes.
    Projection,
    /// State-independent diagonal channels on fixed shapes.
    Diagonal,
}

/// Spatial discretization parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct GridConfig {
    pub k_max: u32,
    pub alpha: f64,
    pub nu: f64,
}

/// Temporal discretization parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeConfig {
    pub horizon: f64,
    pub steps: usize,
}

/// Forcing selection and gain.
#[derive(Debug, Clone, PartialEq)]
pub struct ForcingConfig {
    pub kind: ForcingKind,
    pub kappa: f64,
}

/// Noise selection, per-channel gains, and the seed its shapes are drawn
/// from.  The channel count is the length of `sigmas`.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseConfig {
    pub kind: NoiseKind,
    pub sigmas: Vec<f64>,
    pub shape_seed: u64,
}

/// Initial state: a random divergence-free field with prescribed spectral
/// decay.  The slope is the initial-spectrum smoothness knob; steeper
/// slopes give smoother starting fields.
#[derive(Debug, Clone, PartialEq)]
pub struct InitialConfig {
    pub seed: u64,
    pub slope: f64,
}

/// Monte Carlo ensemble parameters shared by the asymptotic experiments.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleConfig {
    pub samples: usize,
    pub root_seed: u64,
    /// Noise intensities, strictly decreasing, each in (0, 1).
    pub epsilons: Vec<f64>,
    /// Moment orders, each at least 2.
    pub orders: Vec<f64>,
    /// Deviation exponent: the speed is `lambda = eps^(-gamma)`.
    pub gamma: f64,
}

/// Parameters for the `simulate` command.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulateConfig {
    /// Intensity of the single stochastic path; zero replays the
    /// deterministic recursion.
    pub epsilon: f64,
    /// Whether to write initial/final field snapshots.
    pub snapshots: bool,
}

/// Parameters for the `mdp-check` command: the limiting control, its
/// intensity-dependent perturbation, and the uniform moment audit.
#[derive(Debug, Clone, PartialEq)]
pub struct MdpConfig {
    /// Energy-ball radius: controls must satisfy `2 E(h) <= level`.
    pub level: f64,
    pub control_seed: u64,
    /// Action `int |hdot|^2 dt` of the limiting control.
    pub control_action: f64,
    pub perturbation_seed: u64,
    /// Action of the perturbation added at weight `eps^(1/4)`.
    pub perturbation_action: f64,
    /// Action of the audit's own control; sized so the controlled response
    /// dominates the vanishing noise across the intensity sweep.
    pub audit_action: f64,
    pub audit_samples: usize,
    /// Optional derivative table for the limiting control, replacing the
    /// seeded one (CSV columns: step, channel, hdot).
    pub control_csv: Option<PathBuf>,
}

/// Parameters for the `rate` command.
#[derive(Debug, Clone, PartialEq)]
pub struct RateConfig {
    /// Relative residual threshold deciding reachability.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Seed for the self-generated terminal target used when no snapshot
    /// is supplied.
    pub target_seed: u64,
    /// Optional terminal target read from a field snapshot.
    pub target_snapshot: Option<PathBuf>,
}

/// A fully validated run configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub grid: GridConfig,
    pub time: TimeConfig,
    pub forcing: ForcingConfig,
    pub noise: NoiseConfig,
    pub initial: InitialConfig,
    pub ensemble: EnsembleConfig,
    pub simulate: SimulateConfig,
    pub mdp: MdpConfig,
    pub rate: RateConfig,
    /// Output directory; relative paths are taken from the working
    /// directory, and `--out` overrides this.
    pub output_dir: PathBuf,
    /// Hex SHA-256 of the configuration text, recorded in manifests.
    pub config_sha256: String,
}

impl RunConfig {
    /// The spectral grid this configuration describes.
    pub fn build_grid(&self) -> Result<Grid64, CliError> {
        Ok(Grid64::new(self.grid.k_max, self.grid.alpha, self.grid.nu)?)
    }

    /// The time grid this configuration describes.
    pub fn build_time_grid(&self) -> Result<TimeGrid<f64>, CliError> {
        Ok(TimeGrid::new(self.time.horizon, self.time.steps)?)
    }

    /// The coefficient pair (forcing, noise) this configuration selects.
    pub fn build_coefficients(&self, grid: &Grid64) -> CoefficientSet<f64> {
        let forcing: Arc<dyn coefficients::Forcing<f64>> = match self.forcing.kind {
            ForcingKind::Linear => Arc::new(LinearF::new(self.forcing.kappa)),
            ForcingKind::Saturating => Arc::new(SaturatingF::new(self.forcing.kappa)),
        };
        let noise: Arc<dyn coefficients::NoiseMap<f64>> = match self.noise.kind {
            NoiseKind::Projection => Arc::new(ProjectionG::new(
                grid,
                self.noise.sigmas.clone(),
                self.noise.shape_seed,
            )),
            NoiseKind::Diagonal => Arc::new(DiagonalG::new(self.noise.sigmas.clone())),
        };
        CoefficientSet::new(forcing, noise)
    }

    /// The dealiased random divergence-free initial state.
    pub fn build_initial(&self, grid: &Grid64) -> Result<Field64, CliError> {
        let f = random_field(grid, self.initial.seed, self.initial.slope)?;
        Ok(dealias(grid, &f))
    }
}

/// Parse and validate a configuration file.
pub fn parse_config(path: &Path) -> Result<RunConfig, CliError> {
    let src = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    parse_config_str(&src, base)
}

/// Parse and validate configuration text; relative paths inside it are
/// resolved against `base_dir`.
pub fn parse_config_str(src: &str, base_dir: &Path) -> Result<RunConfig, CliError> {
    let raw: RawConfig = toml::from_str(src).map_err(|e| CliError::Config(e.to_string()))?;
    raw.resolve(src, base_dir)
}

// ---------------------------------------------------------------------
// Raw (spanned) layer: what serde actually deserializes.  Spans let range
// violations point at the line carrying the offending value.
// ---------------------------------------------------------------------

fn sp<T>(v: T) -> Spanned<T> {
    Spanned::new(0..0, v)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields, default)]
struct RawConfig {
    grid: RawGrid,
    time: RawTime,
    forcing: RawForcing,
    noise: RawNoise,
    initial: RawInitial,
    ensemble: RawEnsemble,
    simulate: RawSimulate,
    mdp: RawMdp,
    rate: RawRate,
    output: RawOutput,
}

impl Default for RawConfig {
    fn default() -> Self {
        RawConfig {
            grid: RawGrid::default(),
            time: RawTime::default(),
            forcing: RawForcing::default(),
            noise: RawNoise::default(),
            initial: RawInitial::default(),
            ensemble: RawEnsemble::default(),
            simulate: RawSimulate::default(),
            mdp: RawMdp::default(),
            rate: RawRate::default(),
            output: RawOutput::default(),
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields, default)]
struct RawGrid {
    k_max: Spanned<u32>,
    alpha: Spanned<f64>,
    nu: Spanned<f64>,
}

impl Default for RawGrid {
    fn default() -> Self {
        RawGrid {
            k_max: sp(16),
            alpha: sp(1.0),
            nu: sp(0.1),
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields, default)]
struct RawTime {
    horizon: Spanned<f64>,
    steps: Spanned<usize>,
}

impl Default for RawTime {
    fn default() -> Self {
        RawTime {
            horizon: sp(0.5),
            steps: sp(500),
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields, default)]
struct RawForcing {
    kind: Spanned<ForcingKind>,
    kappa: Spanned<f64>,
}

impl Default for RawForcing {
    fn default() -> Self {
        RawForcing {
            kind: sp(ForcingKind::Linear),
            kappa: sp(0.2),
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields, default)]
struct RawNoise {
    kind: Spanned<NoiseKind>,
    sigmas: Spanned<Vec<f64>>,
    shape_seed: Spanned<u64>,
}

impl Default for RawNoise {
    fn default() -> Self {
        RawNoise {
            kind: sp(NoiseKind::Projection),
            sigmas: sp(vec![0.3, 0.2]),
            shape_seed: sp(7),
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields, default)]
struct RawInitial {
    seed: Spanned<u64>,
    slope: Spanned<f64>,
}

impl Default for RawInitial {
    fn default() -> Self {
        RawInitial {
            seed: sp(11),
            slope: sp(1.5),
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields, default)]
struct RawEnsemble {
    samples: Spanned<usize>,
    root_seed: Spanned<u64>,
    epsilons: Spanned<Vec<f64>>,
    orders: Spanned<Vec<f64>>,
    gamma: Spanned<f64>,
}

impl Default for RawEnsemble {
    fn default() -> Self {
        RawEnsemble {
            samples: sp(200),
            root_seed: sp(42),
            epsilons: sp(vec![1e-2, 10f64.powf(-2.5), 1e-3, 10f64.powf(-3.5), 1e-4]),
            orders: sp(vec![2.0]),
            gamma: sp(0.4),
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields, default)]
struct RawSimulate {
    epsilon: Spanned<f64>,
    snapshots: Spanned<bool>,
}

impl Default for RawSimulate {
    fn default() -> Self {
        RawSimulate {
            epsilon: sp(1e-2),
            snapshots: sp(true),
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields, default)]
struct RawMdp {
    level: Spanned<f64>,
    control_seed: Spanned<u64>,
    control_action: Spanned<f64>,
    perturbation_seed: Spanned<u64>,
    perturbation_action: Spanned<f64>,
    audit_action: Spanned<f64>,
    audit_samples: Spanned<usize>,
    control_csv: Option<Spanned<String>>,
}

impl Default for RawMdp {
    fn default() -> Self {
        RawMdp {
            level: sp(4.0),
            control_seed: sp(21),
            control_action: sp(0.1),
            perturbation_seed: sp(22),
            perturbation_action: sp(0.01),
            audit_action: sp(3.5),
            audit_samples: sp(50),
            control_csv: None,
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields, default)]
struct RawRate {
    tolerance: Spanned<f64>,
    max_iterations: Spanned<usize>,
    target_seed: Spanned<u64>,
    target_snapshot: Option<Spanned<String>>,
}

impl Default for RawRate {
    fn default() -> Self {
        RawRate {
            tolerance: sp(1e-8),
            max_iterations: sp(500),
            target_seed: sp(5),
            target_snapshot: None,
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields, default)]
struct RawOutput {
    dir: Spanned<String>,
}

impl Default for RawOutput {
    fn default() -> Self {
        RawOutput {
            dir: sp("g2-out".to_string()),
        }
    }
}

// ---------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------

/// Line-anchored range check context over the raw source text.
struct Checker<'a> {
    src: &'a str,
}

impl<'a> Checker<'a> {
    fn line(&self, span: &Range<usize>) -> usize {
        let cut = span.start.min(self.src.len());
        self.src[..cut].matches('\n').count() + 1
    }

    fn fail<V, T: std::fmt::Debug>(
        &self,
        field: &Spanned<T>,
        key: &str,
        requirement: &str,
    ) -> Result<V, CliError> {
        Err(CliError::Config(format!(
            "line {}: {key} = {:?} {requirement}",
            self.line(&field.span()),
            field.get_ref(),
        )))
    }

    /// A strictly positive, finite float.
    fn positive(&self, field: &Spanned<f64>, key: &str) -> Result<f64, CliError> {
        let v = *field.get_ref();
        if v.is_finite() && v > 0.0 {
            Ok(v)
        } else {
            self.fail(field, key, "must be a positive finite number")
        }
    }

    /// A path that exists on disk, resolved against `base`.
    fn existing_path(
        &self,
        field: &Spanned<String>,
        key: &str,
        base: &Path,
    ) -> Result<PathBuf, CliError> {
        let raw = Path::new(field.get_ref());
        let resolved = if raw.is_absolute() {
            raw.to_path_buf()
        } else {
            base.join(raw)
        };
        if resolved.exists() {
            Ok(resolved)
        } else {
            Err(CliError::Config(format!(
                "line {}: {key} = {:?} refers to a path that does not exist",
                self.line(&field.span()),
                field.get_ref(),
            )))
        }
    }
}

impl RawConfig {
    fn resolve(self, src: &str, base_dir: &Path) -> Result<RunConfig, CliError> {
        let c = Checker { src };

        let k_max = *self.grid.k_max.get_ref();
        if k_max < 2 {
            return c.fail(&self.grid.k_max, "grid.k_max", "must be at least 2");
        }
        let grid = GridConfig {
            k_max,
            alpha: c.positive(&self.grid.alpha, "grid.alpha")?,
            nu: c.positive(&self.grid.nu, "grid.nu")?,
        };

        let steps = *self.time.steps.get_ref();
        if steps == 0 {
            return c.fail(&self.time.steps, "time.steps", "must be at least 1");
        }
        let time = TimeConfig {
            horizon: c.positive(&self.time.horizon, "time.horizon")?,
            steps,
        };

        let forcing = ForcingConfig {
            kind: *self.forcing.kind.get_ref(),
            kappa: c.positive(&self.forcing.kappa, "forcing.kappa")?,
        };

        let sigmas = self.noise.sigmas.get_ref().clone();
        if sigmas.is_empty() {
            return c.fail(&self.noise.sigmas, "noise.sigmas", "must list at least one channel");
        }
        if !sigmas.iter().all(|s| s.is_finite() && *s > 0.0) {
            return c.fail(
                &self.noise.sigmas,
                "noise.sigmas",
                "must contain only positive finite gains",
            );
        }
        let noise = NoiseConfig {
            kind: *self.noise.kind.get_ref(),
            sigmas,
            shape_seed: *self.noise.shape_seed.get_ref(),
        };

        let slope = *self.initial.slope.get_ref();
        if !(slope.is_finite() && slope > 1.0) {
            return c.fail(
                &self.initial.slope,
                "initial.slope",
                "must exceed 1 (spectral decay of the seed field)",
            );
        }
        let initial = InitialConfig {
            seed: *self.initial.seed.get_ref(),
            slope,
        };

        let samples = *self.ensemble.samples.get_ref();
        if samples < 2 {
            return c.fail(&self.ensemble.samples, "ensemble.samples", "must be at least 2");
        }
        let epsilons = self.ensemble.epsilons.get_ref().clone();
        if epsilons.is_empty() {
            return c.fail(
                &self.ensemble.epsilons,
                "ensemble.epsilons",
                "must list at least one intensity",
            );
        }
        if !epsilons.iter().all(|e| e.is_finite() && *e > 0.0 && *e < 1.0) {
            return c.fail(
                &self.ensemble.epsilons,
                "ensemble.epsilons",
                "must contain only intensities in the open interval (0, 1)",
            );
        }
        if !epsilons.windows(2).all(|w| w[1] < w[0]) {
            return c.fail(
                &self.ensemble.epsilons,
                "ensemble.epsilons",
                "must be strictly decreasing",
            );
        }
        let orders = self.ensemble.orders.get_ref().clone();
        if orders.is_empty() {
            return c.fail(&self.ensemble.orders, "ensemble.orders", "must list at least one order");
        }
        if !orders.iter().all(|p| p.is_finite() && *p >= 2.0) {
            return c.fail(
                &self.ensemble.orders,
                "ensemble.orders",
                "must contain only moment orders >= 2",
            );
        }
        let gamma = *self.ensemble.gamma.get_ref();
        if !(gamma.is_finite() && gamma > 0.0 && gamma < 0.5) {
            return c.fail(
                &self.ensemble.gamma,
                "ensemble.gamma",
                "must lie in the open interval (0, 1/2)",
            );
        }
        let ensemble = EnsembleConfig {
            samples,
            root_seed: *self.ensemble.root_seed.get_ref(),
            epsilons,
            orders,
            gamma,
        };

        let sim_eps = *self.simulate.epsilon.get_ref();
        if !(sim_eps.is_finite() && (0.0..1.0).contains(&sim_eps)) {
            return c.fail(
                &self.simulate.epsilon,
                "simulate.epsilon",
                "must lie in [0, 1); zero replays the deterministic path",
            );
        }
        let simulate = SimulateConfig {
            epsilon: sim_eps,
            snapshots: *self.simulate.snapshots.get_ref(),
        };

        let audit_samples = *self.mdp.audit_samples.get_ref();
        if audit_samples < 2 {
            return c.fail(&self.mdp.audit_samples, "mdp.audit_samples", "must be at least 2");
        }
        let mdp = MdpConfig {
            level: c.positive(&self.mdp.level, "mdp.level")?,
            control_seed: *self.mdp.control_seed.get_ref(),
            control_action: c.positive(&self.mdp.control_action, "mdp.control_action")?,
            perturbation_seed: *self.mdp.perturbation_seed.get_ref(),
            perturbation_action: c.positive(&self.mdp.perturbation_action, "mdp.perturbation_action")?,
            audit_action: c.positive(&self.mdp.audit_action, "mdp.audit_action")?,
            audit_samples,
            control_csv: self
                .mdp
                .control_csv
                .as_ref()
                .map(|p| c.existing_path(p, "mdp.control_csv", base_dir))
                .transpose()?,
        };

        let max_iterations = *self.rate.max_iterations.get_ref();
        if max_iterations == 0 {
            return c.fail(&self.rate.max_iterations, "rate.max_iterations", "must be at least 1");
        }
        let rate = RateConfig {
            tolerance: c.positive(&self.rate.tolerance, "rate.tolerance")?,
            max_iterations,
            target_seed: *self.rate.target_seed.get_ref(),
            target_snapshot: self
                .rate
                .target_snapshot
                .as_ref()
                .map(|p| c.existing_path(p, "rate.target_snapshot", base_dir))
                .transpose()?,
        };

        Ok(RunConfig {
            grid,
            time,
            forcing,
            noise,
            initial,
            ensemble,
            simulate,
            mdp,
            rate,
            output_dir: PathBuf::from(self.output.dir.get_ref()),
            config_sha256: sha256_hex(src.as_bytes()),
        })
    }
}
