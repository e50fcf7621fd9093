use crate::{CoefficientError, CoefficientSet};
use spectral_core::{
    apply_stokes_multiplier, random_field, real, Scalar, SpectralField, SpectralGrid,
    StokesMultiplier,
};

/// The lift (I+αA)⁻¹ that turns model-space outputs F, G into the F̂, Ĝ the
/// evolution equations consume. Mode-wise multiplication by 1/(1+α|k|²);
/// commutes with linear combinations and with the Leray projection.
pub fn hat_lift<T: Scalar>(grid: &SpectralGrid<T>, f: &SpectralField<T>) -> SpectralField<T> {
    apply_stokes_multiplier(grid, f, StokesMultiplier::InverseHelmholtz)
}

/// Outcome of [`check_lipschitz`]: the worst sampled difference quotients of
/// F and G in the V norm against the declared constants.
#[derive(Debug, Clone)]
pub struct LipschitzReport<T: Scalar> {
    pub forcing_max_ratio: T,
    pub forcing_bound: T,
    pub noise_max_ratio: T,
    pub noise_bound: T,
    pub pairs_sampled: usize,
    pub pass: bool,
}

/// Sample all pairs of `n_samples` seeded random states (spread over three
/// decades of amplitude) and compare the V-norm difference quotients of F
/// and of the joint noise map against the declared constants. Declared
/// bounds may be exceeded only by the 10⁻⁶ sampling slack; a violation
/// reports the offending pair.
pub fn check_lipschitz<T: Scalar>(
    grid: &SpectralGrid<T>,
    set: &CoefficientSet<T>,
    n_samples: usize,
    seed: u64,
) -> Result<LipschitzReport<T>, CoefficientError> {
    if n_samples < 2 {
        return Err(CoefficientError::InsufficientSamples(n_samples));
    }
    let samples: Vec<SpectralField<T>> = (0..n_samples)
        .map(|i| {
            let amplitude = real::<T>(10f64.powi(i as i32 % 3 - 1));
            let mut f = random_field(grid, seed.wrapping_add(i as u64), 2.5)
                .expect("slope 2.5 exceeds the admissible threshold");
            f.scale(amplitude);
            f
        })
        .collect();
    check_lipschitz_on(grid, set, &samples)
}

/// [`check_lipschitz`] over a caller-supplied list of states. Coincident
/// pairs are skipped (no quotient exists), never divided through.
pub fn check_lipschitz_on<T: Scalar>(
    grid: &SpectralGrid<T>,
    set: &CoefficientSet<T>,
    samples: &[SpectralField<T>],
) -> Result<LipschitzReport<T>, CoefficientError> {
    if samples.len() < 2 {
        return Err(CoefficientError::InsufficientSamples(samples.len()));
    }
    let n_samples = samples.len();
    let t = T::zero();
    let slack = T::one() + real::<T>(1e-6);
    let f_bound = set.forcing.lipschitz_c1();
    let g_bound = set.noise.lipschitz_c3();
    let mut worst_f = T::zero();
    let mut worst_g = T::zero();
    let mut pairs = 0usize;

    for i in 0..n_samples {
        let fi = set.forcing.eval_f(grid, &samples[i], t);
        let gi = set.noise.eval_g(grid, &samples[i], t);
        for j in (i + 1)..n_samples {
            let mut du = samples[i].clone();
            du.axpy(-T::one(), &samples[j]);
            let d = grid.norm_v(&du);
            if d <= T::zero() {
                continue; // degenerate pair: nothing to quotient
            }
            pairs += 1;

            let mut df = fi.clone();
            df.axpy(-T::one(), &set.forcing.eval_f(grid, &samples[j], t));
            let f_ratio = grid.norm_v(&df) / d;
            if f_ratio > worst_f {
                worst_f = f_ratio;
            }
            if f_ratio > f_bound * slack {
                return Err(CoefficientError::LipschitzViolation {
                    map: set.forcing.name().to_string(),
                    ratio: f_ratio.to_f64().unwrap_or(f64::NAN),
                    bound: f_bound.to_f64().unwrap_or(f64::NAN),
                    first: i,
                    second: j,
                });
            }

            let gj = set.noise.eval_g(grid, &samples[j], t);
            let mut sq = T::zero();
            for (a, b) in gi.iter().zip(&gj) {
                let mut dg = a.clone();
                dg.axpy(-T::one(), b);
                let n = grid.norm_v(&dg);
                sq += n * n;
            }
            let g_ratio = sq.sqrt() / d;
            if g_ratio > worst_g {
                worst_g = g_ratio;
            }
            if g_ratio > g_bound * slack {
                return Err(CoefficientError::LipschitzViolation {
                    map: set.noise.name().to_string(),
                    ratio: g_ratio.to_f64().unwrap_or(f64::NAN),
                    bound: g_bound.to_f64().unwrap_or(f64::NAN),
                    first: i,
                    second: j,
                });
            }
        }
    }

    Ok(LipschitzReport {
        forcing_max_ratio: worst_f,
        forcing_bound: f_bound,
        noise_max_ratio: worst_g,
        noise_bound: g_bound,
        pairs_sampled: pairs,
        pass: true,
    })
}

/// Central-finite-difference validation of F′ at (u, t) in direction v:
/// (F(u+δv) − F(u−δv))/(2δ) against F′(u, t; v) for δ ∈ {10⁻³, 10⁻⁴, 10⁻⁵}.
/// Returns the best relative V-norm error over the three widths; a correct
/// derivative lands at or below 10⁻⁶.
pub fn derivative_check<T: Scalar>(
    grid: &SpectralGrid<T>,
    set: &CoefficientSet<T>,
    u: &SpectralField<T>,
    v: &SpectralField<T>,
    t: T,
) -> Result<T, CoefficientError> {
    if grid.norm_v(v) <= T::zero() {
        return Err(CoefficientError::ZeroDirection);
    }
    let exact = set.forcing.eval_f_prime(grid, u, t, v);
    let denom = grid.norm_v(&exact).max(T::epsilon());
    let mut best = T::infinity();
    for delta_f64 in [1e-3, 1e-4, 1e-5] {
        let delta = real::<T>(delta_f64);
        let mut up = u.clone();
        up.axpy(delta, v);
        let mut dn = u.clone();
        dn.axpy(-delta, v);
        let mut fd = set.forcing.eval_f(grid, &up, t);
        fd.axpy(-T::one(), &set.forcing.eval_f(grid, &dn, t));
        fd.scale(T::one() / (delta + delta));
        fd.axpy(-T::one(), &exact);
        let err = grid.norm_v(&fd) / denom;
        if err < best {
            best = err;
        }
    }
    Ok(best)
}
