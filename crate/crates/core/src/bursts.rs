//! Fixed-threshold burst extraction and burst-scaling exponents.
//!
//! A burst runs from an upward crossing of the threshold L (sample k with
//! `y[k] <= L < y[k+1]`) to the next downward crossing (`y[k] > L >= y[k+1]`).
//! Its duration is the crossing separation in time and its size the
//! integrated area above the threshold. Excursions already in progress at
//! either end of the record are discarded. Crossings are located at sample
//! resolution; durations are integer multiples of dt.

use crate::stats;
use crate::synth::SamplePath;
use crate::tailfit::{self, FitError, TailFit};
use serde::Serialize;
use thiserror::Error;

/// Below this many bursts an exponent estimate is flagged low-confidence.
pub const MIN_BURSTS: usize = 500;

/// Minimum ensemble size for the size-duration slope.
const MIN_BURSTS_PSI: usize = 100;

/// Minimum dynamic range (decades of duration) for the size-duration slope.
const MIN_DECADES_PSI: f64 = 1.5;

#[derive(Debug, Error)]
pub enum BurstError {
    #[error("tail fit failed: {0}")]
    Fit(#[from] FitError),
    #[error("degenerate ensemble: {0}")]
    Degenerate(String),
    #[error("insufficient dynamic range: {got:.2} decades of duration, need {need}")]
    InsufficientRange { got: f64, need: f64 },
    #[error("hurst parameter {0} outside (0, 1)")]
    BadHurst(f64),
}

/// One excursion above the threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Burst {
    /// sample index of the upward crossing
    pub up_index: usize,
    /// sample index of the following downward crossing
    pub down_index: usize,
    /// (down_index - up_index) * dt
    pub duration: f64,
    /// sum of (y - L) * dt over the samples strictly inside the excursion
    pub size: f64,
}

/// All bursts of one path at one threshold, in record order.
#[derive(Debug, Clone)]
pub struct BurstEnsemble {
    pub bursts: Vec<Burst>,
    pub threshold: f64,
    pub dt: f64,
    pub source: crate::synth::Provenance,
}

impl BurstEnsemble {
    pub fn len(&self) -> usize {
        self.bursts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bursts.is_empty()
    }

    pub fn durations(&self) -> Vec<f64> {
        self.bursts.iter().map(|b| b.duration).collect()
    }

    pub fn sizes(&self) -> Vec<f64> {
        self.bursts.iter().map(|b| b.size).collect()
    }
}

/// Extract every complete burst above `threshold`. An empty ensemble is a
/// valid result.
pub fn find_bursts(path: &SamplePath, threshold: f64) -> BurstEnsemble {
    let y = &path.values;
    let dt = path.dt;
    let mut bursts = Vec::new();
    let mut up: Option<usize> = None;
    let mut area = 0.0;
    // single forward scan; y[k] > L means "inside an excursion" at sample k
    for k in 0..y.len().saturating_sub(1) {
        match up {
            None => {
                if y[k] <= threshold && y[k + 1] > threshold {
                    up = Some(k);
                    area = 0.0;
                }
            }
            Some(i) => {
                // k > i here, and y[k] > threshold by construction
                area += (y[k] - threshold) * dt;
                if y[k + 1] <= threshold {
                    // y[k] > L >= y[k+1]: downward crossing at k
                    bursts.push(Burst {
                        up_index: i,
                        down_index: k,
                        duration: (k - i) as f64 * dt,
                        size: area,
                    });
                    up = None;
                }
            }
        }
    }
    // an excursion still open at the end of the record is discarded
    BurstEnsemble {
        bursts,
        threshold,
        dt,
        source: path.provenance.clone(),
    }
}

fn exponent_fit(
    samples: &[f64],
    n_bursts: usize,
    min_tail: usize,
    what: &str,
) -> Result<TailFit, BurstError> {
    if samples.is_empty() {
        return Err(BurstError::Degenerate(format!("no {what} samples")));
    }
    let first = samples[0];
    if samples.iter().all(|&s| s == first) {
        return Err(BurstError::Degenerate(format!("all {what} values equal")));
    }
    let mut fit = tailfit::fit_tail(samples, None, min_tail)?;
    fit.low_confidence = n_bursts < MIN_BURSTS;
    Ok(fit)
}

/// Power-law fit of the duration tail, `p(tau) ~ tau^{-beta}`; the exponent
/// is reported as a positive decay magnitude.
pub fn duration_exponent(ens: &BurstEnsemble) -> Result<TailFit, BurstError> {
    duration_exponent_with_floor(ens, tailfit::DEFAULT_MIN_TAIL)
}

/// As [`duration_exponent`] with an explicit tail-size floor for the cutoff
/// scan (small ensembles at high H need a lower floor).
pub fn duration_exponent_with_floor(
    ens: &BurstEnsemble,
    min_tail: usize,
) -> Result<TailFit, BurstError> {
    exponent_fit(&ens.durations(), ens.len(), min_tail, "duration")
}

/// Power-law fit of the size tail, `p(s) ~ s^{-|gamma|}`, magnitude
/// convention.
pub fn size_exponent(ens: &BurstEnsemble) -> Result<TailFit, BurstError> {
    size_exponent_with_floor(ens, tailfit::DEFAULT_MIN_TAIL)
}

pub fn size_exponent_with_floor(
    ens: &BurstEnsemble,
    min_tail: usize,
) -> Result<TailFit, BurstError> {
    exponent_fit(&ens.sizes(), ens.len(), min_tail, "size")
}

/// Growth exponent psi of burst size with duration: the least-squares slope
/// of log s against log tau, fitted through binned medians so that the
/// heteroscedastic scatter of large bursts does not dominate.
pub fn size_duration_exponent(ens: &BurstEnsemble) -> Result<f64, BurstError> {
    if ens.len() < MIN_BURSTS_PSI {
        return Err(BurstError::Degenerate(format!(
            "need >= {MIN_BURSTS_PSI} bursts for the size-duration slope, got {}",
            ens.len()
        )));
    }
    let mut pairs: Vec<(f64, f64)> = ens
        .bursts
        .iter()
        .filter(|b| b.duration > 0.0 && b.size > 0.0)
        .map(|b| (b.duration.ln(), b.size.ln()))
        .collect();
    if pairs.len() < MIN_BURSTS_PSI {
        return Err(BurstError::Degenerate(
            "too few bursts with positive duration and size".into(),
        ));
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let lo = pairs[0].0;
    let hi = pairs[pairs.len() - 1].0;
    let decades = (hi - lo) / std::f64::consts::LN_10;
    if decades < MIN_DECADES_PSI {
        return Err(BurstError::InsufficientRange {
            got: decades,
            need: MIN_DECADES_PSI,
        });
    }

    // ~8 bins per decade of duration; medians preserve exact power laws
    let n_bins = ((decades * 8.0).ceil() as usize).max(4);
    let width = (hi - lo) / n_bins as f64;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut start = 0usize;
    for bin in 0..n_bins {
        let upper = if bin + 1 == n_bins {
            f64::INFINITY
        } else {
            lo + (bin + 1) as f64 * width
        };
        let mut end = start;
        while end < pairs.len() && pairs[end].0 < upper {
            end += 1;
        }
        if end > start {
            let slice = &pairs[start..end];
            xs.push(median_of_sorted(slice, |p| p.0));
            ys.push(median_by(slice, |p| p.1));
            start = end;
        }
    }
    if xs.len() < 3 {
        return Err(BurstError::InsufficientRange {
            got: decades,
            need: MIN_DECADES_PSI,
        });
    }
    let (slope, _) = stats::ols(&xs, &ys);
    Ok(slope)
}

fn median_of_sorted(slice: &[(f64, f64)], f: impl Fn(&(f64, f64)) -> f64) -> f64 {
    let n = slice.len();
    if n % 2 == 1 {
        f(&slice[n / 2])
    } else {
        0.5 * (f(&slice[n / 2 - 1]) + f(&slice[n / 2]))
    }
}

fn median_by(slice: &[(f64, f64)], f: impl Fn(&(f64, f64)) -> f64) -> f64 {
    let mut vals: Vec<f64> = slice.iter().map(f).collect();
    vals.sort_by(|a, b| a.total_cmp(b));
    let n = vals.len();
    if n % 2 == 1 {
        vals[n / 2]
    } else {
        0.5 * (vals[n / 2 - 1] + vals[n / 2])
    }
}

/// The scaling-argument predictions (beta, |gamma|, psi) =
/// (2 - H, 2/(1 + H), 1 + H).
pub fn predicted_exponents(hurst: f64) -> Result<(f64, f64, f64), BurstError> {
    if !(hurst > 0.0 && hurst < 1.0) {
        return Err(BurstError::BadHurst(hurst));
    }
    Ok((2.0 - hurst, 2.0 / (1.0 + hurst), 1.0 + hurst))
}
