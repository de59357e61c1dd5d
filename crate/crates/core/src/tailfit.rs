//! Maximum-likelihood power-law tail fitting with KS-minimizing lower cutoff.
//!
//! Exponents follow the pdf convention: a fit with `exponent = a` means
//! `p(x) ~ x^{-a}` above `xmin` (the CCDF exponent is `a - 1`).

use serde::Serialize;
use thiserror::Error;

/// Default floor on the number of tail samples a candidate cutoff must keep.
pub const DEFAULT_MIN_TAIL: usize = 50;

/// Cap on the number of cutoff candidates scanned by [`select_xmin`];
/// above this, candidates are log-spaced quantiles of the sample.
const MAX_XMIN_CANDIDATES: usize = 256;

#[derive(Debug, Error)]
pub enum FitError {
    #[error("need at least {need} positive samples >= xmin, got {got}")]
    TooFewSamples { got: usize, need: usize },
    #[error("degenerate sample: all tail values equal xmin, MLE diverges")]
    DegenerateSample,
    #[error("no cutoff candidate keeps at least {min_tail} tail samples")]
    NoValidXmin { min_tail: usize },
    #[error("empty tail above xmin = {xmin}")]
    EmptyTail { xmin: f64 },
    #[error("xmin = {0} must be positive and finite")]
    InvalidXmin(f64),
}

/// A fitted power-law tail.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TailFit {
    /// pdf decay magnitude, > 1
    pub exponent: f64,
    /// lower cutoff of the fitted tail
    pub xmin: f64,
    /// KS distance between the tail empirical CDF and the fitted law
    pub ks: f64,
    /// number of samples >= xmin
    pub n_tail: usize,
    /// asymptotic standard error (exponent - 1) / sqrt(n_tail)
    pub stderr: f64,
    /// set when the caller flagged the ensemble as too small for a
    /// trustworthy tail estimate
    pub low_confidence: bool,
}

/// Continuous MLE on the tail `x >= xmin`:
/// `exponent = 1 + n / sum ln(x_i/xmin)`, `stderr = (exponent-1)/sqrt(n)`.
pub fn fit_exponent(samples: &[f64], xmin: f64) -> Result<(f64, f64), FitError> {
    if !(xmin > 0.0 && xmin.is_finite()) {
        return Err(FitError::InvalidXmin(xmin));
    }
    let mut n = 0usize;
    let mut sum_ln = 0.0;
    for &x in samples {
        if x >= xmin {
            n += 1;
            sum_ln += (x / xmin).ln();
        }
    }
    if n < 2 {
        return Err(FitError::TooFewSamples { got: n, need: 2 });
    }
    if sum_ln <= 0.0 {
        return Err(FitError::DegenerateSample);
    }
    let exponent = 1.0 + n as f64 / sum_ln;
    let stderr = (exponent - 1.0) / (n as f64).sqrt();
    Ok((exponent, stderr))
}

/// KS distance between the empirical CDF of the tail `x >= xmin` and the
/// fitted power law with CCDF `(x/xmin)^{1-exponent}`.
pub fn ks_distance(samples: &[f64], xmin: f64, exponent: f64) -> Result<f64, FitError> {
    if !(xmin > 0.0 && xmin.is_finite()) {
        return Err(FitError::InvalidXmin(xmin));
    }
    let mut tail: Vec<f64> = samples.iter().copied().filter(|&x| x >= xmin).collect();
    if tail.is_empty() {
        return Err(FitError::EmptyTail { xmin });
    }
    tail.sort_by(|a, b| a.total_cmp(b));
    Ok(ks_distance_sorted(&tail, xmin, exponent))
}

fn ks_distance_sorted(tail: &[f64], xmin: f64, exponent: f64) -> f64 {
    let n = tail.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in tail.iter().enumerate() {
        let f = 1.0 - (x / xmin).powf(1.0 - exponent);
        d = d.max((f - i as f64 / n).abs());
        d = d.max(((i + 1) as f64 / n - f).abs());
    }
    d
}

/// Pick the cutoff among the sample values that minimizes the KS distance
/// between the tail and its own MLE fit, keeping at least
/// [`DEFAULT_MIN_TAIL`] tail samples.
pub fn select_xmin(samples: &[f64]) -> Result<f64, FitError> {
    select_xmin_with_floor(samples, DEFAULT_MIN_TAIL)
}

/// As [`select_xmin`] with an explicit tail-size floor.
pub fn select_xmin_with_floor(samples: &[f64], min_tail: usize) -> Result<f64, FitError> {
    let min_tail = min_tail.max(2);
    let mut sorted: Vec<f64> = samples.iter().copied().filter(|x| *x > 0.0).collect();
    if sorted.len() < min_tail {
        return Err(FitError::NoValidXmin { min_tail });
    }
    sorted.sort_by(|a, b| a.total_cmp(b));
    let n = sorted.len();

    // suffix sums of ln x make every candidate fit O(1)
    let mut suffix_ln = vec![0.0f64; n + 1];
    for i in (0..n).rev() {
        suffix_ln[i] = suffix_ln[i + 1] + sorted[i].ln();
    }

    // candidate cutoffs: every distinct value when the sample is small,
    // otherwise log-spaced quantiles of the admissible range
    let last_admissible = n - min_tail; // candidate index must be <= this
    let candidate_indices: Vec<usize> = if last_admissible + 1 <= MAX_XMIN_CANDIDATES {
        (0..=last_admissible).collect()
    } else {
        let m = MAX_XMIN_CANDIDATES as f64;
        (0..MAX_XMIN_CANDIDATES)
            .map(|i| ((last_admissible as f64) * (i as f64 / (m - 1.0))).round() as usize)
            .collect()
    };

    let mut best: Option<(f64, f64)> = None; // (ks, xmin)
    let mut prev_value = f64::NAN;
    for &idx in &candidate_indices {
        let xmin = sorted[idx];
        if xmin == prev_value {
            continue;
        }
        prev_value = xmin;
        let n_tail = n - idx;
        let sum_ln = suffix_ln[idx] - n_tail as f64 * xmin.ln();
        if sum_ln <= 0.0 {
            continue; // all tail values identical
        }
        let exponent = 1.0 + n_tail as f64 / sum_ln;
        let ks = ks_distance_sorted(&sorted[idx..], xmin, exponent);
        if best.map_or(true, |(bks, _)| ks < bks) {
            best = Some((ks, xmin));
        }
    }
    best.map(|(_, xmin)| xmin)
        .ok_or(FitError::NoValidXmin { min_tail })
}

/// Full fit: select the cutoff (unless given), run the MLE, report the KS
/// distance of the result.
pub fn fit_tail(
    samples: &[f64],
    xmin: Option<f64>,
    min_tail: usize,
) -> Result<TailFit, FitError> {
    let xmin = match xmin {
        Some(v) => v,
        None => select_xmin_with_floor(samples, min_tail)?,
    };
    let (exponent, stderr) = fit_exponent(samples, xmin)?;
    let n_tail = samples.iter().filter(|&&x| x >= xmin).count();
    let ks = ks_distance(samples, xmin, exponent)?;
    Ok(TailFit {
        exponent,
        xmin,
        ks,
        n_tail,
        stderr,
        low_confidence: false,
    })
}

/// Inverse-CDF Pareto sampler used as the calibration oracle in tests and
/// the estimator-consistency checks: pdf exponent `a`, support `x >= xmin`.
pub fn pareto_quantile(u: f64, xmin: f64, exponent: f64) -> f64 {
    xmin * (1.0 - u).powf(-1.0 / (exponent - 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn mle_exact_on_single_log_spacing() {
        // all samples at e * xmin: sum ln = n, exponent = 2 exactly
        let xs = vec![std::f64::consts::E * 3.0; 10];
        let (a, se) = fit_exponent(&xs, 3.0).unwrap();
        assert!((a - 2.0).abs() < 1e-12);
        assert!((se - 1.0 / 10f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn mle_exact_on_double_log_spacing() {
        let xs = vec![(2f64).exp(), (2f64).exp()];
        let (a, _) = fit_exponent(&xs, 1.0).unwrap();
        assert!((a - 1.5).abs() < 1e-12);
    }

    #[test]
    fn degenerate_sample_is_an_error() {
        let xs = vec![5.0; 20];
        assert!(matches!(
            fit_exponent(&xs, 5.0),
            Err(FitError::DegenerateSample)
        ));
        assert!(matches!(
            select_xmin_with_floor(&xs, 10),
            Err(FitError::NoValidXmin { .. })
        ));
    }

    #[test]
    fn pareto_recovery_with_known_xmin() {
        let truth = 2.5;
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let xs: Vec<f64> = (0..10_000)
            .map(|_| pareto_quantile(rng.gen(), 1.0, truth))
            .collect();
        let (a, se) = fit_exponent(&xs, 1.0).unwrap();
        assert!((a - truth).abs() < 2.0 * se, "a={a} se={se}");
    }

    #[test]
    fn ks_distance_on_exact_quantile_grid() {
        // plugging the exact quantiles back in bounds KS by 1/(2n)
        let n = 1000;
        let a = 2.5;
        let xs: Vec<f64> = (0..n)
            .map(|i| pareto_quantile((i as f64 + 0.5) / n as f64, 1.0, a))
            .collect();
        let d = ks_distance(&xs, 1.0, a).unwrap();
        assert!(d <= 0.5 / n as f64 + 1e-12, "d = {d}");
    }

    #[test]
    fn wrong_exponent_inflates_ks() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let xs: Vec<f64> = (0..10_000)
            .map(|_| pareto_quantile(rng.gen(), 1.0, 2.5))
            .collect();
        let d_true = ks_distance(&xs, 1.0, 2.5).unwrap();
        let d_wrong = ks_distance(&xs, 1.0, 3.5).unwrap();
        assert!(d_true < 0.02, "d_true = {d_true}");
        assert!(d_wrong > 5.0 * d_true, "{d_wrong} vs {d_true}");
    }

    #[test]
    fn scale_equivariance_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let xs: Vec<f64> = (0..500)
            .map(|_| pareto_quantile(rng.gen(), 2.0, 1.7))
            .collect();
        let (a1, _) = fit_exponent(&xs, 2.0).unwrap();
        let c = 37.5;
        let scaled: Vec<f64> = xs.iter().map(|x| c * x).collect();
        let (a2, _) = fit_exponent(&scaled, c * 2.0).unwrap();
        assert_eq!(a1, a2);
    }

    #[test]
    fn stderr_shrinks_like_inverse_sqrt_n() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let xs: Vec<f64> = (0..40_000)
            .map(|_| pareto_quantile(rng.gen(), 1.0, 2.0))
            .collect();
        let (_, se_full) = fit_exponent(&xs, 1.0).unwrap();
        let (_, se_quarter) = fit_exponent(&xs[..10_000], 1.0).unwrap();
        let ratio = se_quarter / se_full;
        assert!((ratio - 2.0).abs() < 0.2, "ratio = {ratio}");
    }

    #[test]
    fn fit_tail_reports_all_fields() {
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        let xs: Vec<f64> = (0..5_000)
            .map(|_| pareto_quantile(rng.gen(), 1.0, 2.0))
            .collect();
        let fit = fit_tail(&xs, None, 50).unwrap();
        assert!(fit.exponent > 1.0);
        assert!(fit.n_tail >= 50);
        assert!(fit.stderr > 0.0);
        assert!(fit.ks < 0.05);
        assert!(!fit.low_confidence);
    }
}
