//! Deterministic summary statistics for ensemble output: batch-means error
//! bars and log-log power-law fits.

use crate::error::AsymptoticsError;
use spectral_core::{real, Scalar};

/// Mean of `values` together with a batch-means standard error.
///
/// The samples are split in index order into `batches` contiguous blocks of
/// near-equal size; the standard error is the standard deviation of the
/// block means divided by `sqrt(batches)`.  Everything is a sequential
/// reduction in sample order, so the result is bitwise independent of how
/// the samples were produced.  With fewer samples than batches each sample
/// forms its own block; a single block yields a zero standard error.
pub fn batch_means<T: Scalar>(values: &[T], batches: usize) -> (T, T) {
    assert!(!values.is_empty(), "batch_means needs at least one value");
    let n = values.len();
    let b = batches.clamp(1, n);

    let mean = values.iter().copied().sum::<T>() / real::<T>(n as f64);
    if b < 2 {
        return (mean, T::zero());
    }

    let mut block_means = Vec::with_capacity(b);
    for i in 0..b {
        let lo = i * n / b;
        let hi = (i + 1) * n / b;
        let block = &values[lo..hi];
        block_means.push(block.iter().copied().sum::<T>() / real::<T>(block.len() as f64));
    }
    let grand = block_means.iter().copied().sum::<T>() / real::<T>(b as f64);
    let var = block_means
        .iter()
        .map(|&m| (m - grand) * (m - grand))
        .sum::<T>()
        / real::<T>((b - 1) as f64);
    (mean, (var / real::<T>(b as f64)).sqrt())
}

/// Least-squares fit of `log(estimate)` against `log(epsilon)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlopeFit<T: Scalar> {
    /// Fitted scaling exponent.
    pub slope: T,
    /// Fitted log-intercept (log of the constant prefactor).
    pub intercept: T,
    /// Coefficient of determination of the log-log fit.
    pub r2: T,
}

/// Fits a power law `m(eps) = C eps^slope` through `(epsilon, estimate)`
/// points by least squares in log-log coordinates.
///
/// The fit refuses tables it cannot certify: fewer than three points,
/// non-positive epsilons or estimates, or an epsilon range spanning less
/// than two decades.
pub fn fit_power_law<T: Scalar>(points: &[(T, T)]) -> Result<SlopeFit<T>, AsymptoticsError> {
    if points.len() < 3 {
        return Err(AsymptoticsError::FitRejected(format!(
            "need at least 3 points, got {}",
            points.len()
        )));
    }
    for &(eps, m) in points {
        if !(eps > T::zero()) || !eps.is_finite() {
            return Err(AsymptoticsError::FitRejected(format!(
                "epsilon {eps} is not positive and finite"
            )));
        }
        if !(m > T::zero()) || !m.is_finite() {
            return Err(AsymptoticsError::FitRejected(format!(
                "estimate {m} at epsilon {eps} is not positive and finite"
            )));
        }
    }
    let min_eps = points.iter().map(|p| p.0).fold(T::infinity(), T::min);
    let max_eps = points.iter().map(|p| p.0).fold(T::zero(), T::max);
    if max_eps / min_eps < real::<T>(100.0 * (1.0 - 1e-9)) {
        return Err(AsymptoticsError::FitRejected(format!(
            "epsilon range [{min_eps:e}, {max_eps:e}] spans less than two decades"
        )));
    }

    let n = real::<T>(points.len() as f64);
    let xs: Vec<T> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<T> = points.iter().map(|p| p.1.ln()).collect();
    let mean_x = xs.iter().copied().sum::<T>() / n;
    let mean_y = ys.iter().copied().sum::<T>() / n;
    let mut sxx = T::zero();
    let mut sxy = T::zero();
    for (&x, &y) in xs.iter().zip(&ys) {
        sxx += (x - mean_x) * (x - mean_x);
        sxy += (x - mean_x) * (y - mean_y);
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let mut ss_res = T::zero();
    let mut ss_tot = T::zero();
    for (&x, &y) in xs.iter().zip(&ys) {
        let fit = intercept + slope * x;
        ss_res += (y - fit) * (y - fit);
        ss_tot += (y - mean_y) * (y - mean_y);
    }
    let r2 = if ss_tot > T::zero() {
        T::one() - ss_res / ss_tot
    } else {
        T::one()
    };
    Ok(SlopeFit { slope, intercept, r2 })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_laws_are_recovered() {
        let pts: Vec<(f64, f64)> = [1e-2, 1e-3, 1e-4]
            .iter()
            .map(|&e| (e, e))
            .collect();
        let fit = fit_power_law(&pts).unwrap();
        assert!((fit.slope - 1.0).abs() <= 1e-12);
        assert!(fit.intercept.abs() <= 1e-12);
        assert!((fit.r2 - 1.0).abs() <= 1e-12);

        let pts: Vec<(f64, f64)> = [1e-1f64, 1e-2, 1e-3, 1e-4]
            .iter()
            .map(|&e| (e, 7.0 * e.powf(1.5)))
            .collect();
        let fit = fit_power_law(&pts).unwrap();
        assert!((fit.slope - 1.5).abs() <= 1e-10);
        assert!((fit.intercept - 7.0f64.ln()).abs() <= 1e-10);
    }

    #[test]
    fn unfittable_tables_are_refused() {
        // Too few points.
        assert!(fit_power_law(&[(1e-2, 1.0), (1e-4, 0.1)]).is_err());
        // Non-positive estimate.
        assert!(fit_power_law(&[(1e-2, 1.0), (1e-3, 0.0), (1e-4, 0.1)]).is_err());
        // Range too narrow (one decade).
        assert!(fit_power_law(&[(1e-2, 1.0), (3e-3, 0.5), (1e-3, 0.2)]).is_err());
    }

    #[test]
    fn batch_means_basics() {
        // Constant data: exact mean, zero spread.
        let (m, se) = batch_means(&vec![2.5f64; 40], 10);
        assert_eq!(m, 2.5);
        assert_eq!(se, 0.0);
        // Two blocks of known means 1 and 3: grand mean 2, block variance 2,
        // stderr = sqrt(2/2) = 1.
        let mut v = vec![1.0f64; 5];
        v.extend(vec![3.0f64; 5]);
        let (m, se) = batch_means(&v, 2);
        assert_eq!(m, 2.0);
        assert!((se - 1.0).abs() <= 1e-15);
        // Fewer samples than batches degrades gracefully.
        let (m, _) = batch_means(&[1.0f64, 2.0], 10);
        assert_eq!(m, 1.5);
    }
}
