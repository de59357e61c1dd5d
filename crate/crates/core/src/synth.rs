//! Sample-path synthesis for linear fractional stable motion and its
//! ordinary-Levy / Brownian limits.
//!
//! The process is discretized as a moving average of alpha-stable
//! innovations on a refined mesh (`mesh` sub-steps per output step,
//! `truncation` output steps of kernel history). Unit-lag increments are
//!
//! ```text
//! X(k) = sum_j w(j) Z(k*mesh - j),   w(j) ~ (j/m)^d - ((j-m)/m)^d,
//! ```
//!
//! with memory exponent `d = H - 1/alpha`, and the path is the cumulative
//! sum of increments rescaled by `dt^H`. The weights are normalized so the
//! unit-lag increment has exactly the requested stable scale. Convolution
//! runs as streaming overlap-save FFT blocks, so memory stays O(block)
//! instead of O(mesh * (truncation + n)).

use crate::stable::{fill_stable, StableLaw};
use crate::stats;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// |d| below this collapses the kernel to a single tap and synthesis
/// dispatches to plain cumulative summation (the ordinary-Levy limit).
pub const DEGENERATE_D_EPS: f64 = 1e-9;

/// Practical ceiling on the innovation count `mesh*(n + 2*truncation)`;
/// beyond this a run is declared a capacity error rather than left to
/// grind for hours.
const MAX_INNOVATIONS: u128 = 1 << 40;

const MIN_INCREMENTS_PER_LAG: usize = 16;

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("invalid process spec: {0}")]
    InvalidSpec(String),
    #[error("invalid synthesis grid: {0}")]
    InvalidGrid(String),
    #[error("workspace of {required} innovations exceeds capacity")]
    Capacity { required: u128 },
    #[error("synthesis produced non-finite values")]
    NonFinite,
    #[error("hurst estimation failed: {0}")]
    Estimation(String),
}

/// Process parameters: Hurst exponent, stability exponent, kernel mixture
/// and output scale. The memory exponent `d = H - 1/alpha` is derived.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LfsmSpec {
    hurst: f64,
    alpha: f64,
    b1: f64,
    b2: f64,
    scale: f64,
}

impl LfsmSpec {
    /// Causal kernel (b1 = 1, b2 = 0), unit scale.
    pub fn new(hurst: f64, alpha: f64) -> Result<Self, SynthError> {
        Self::with_kernel(hurst, alpha, 1.0, 0.0, 1.0)
    }

    pub fn with_scale(hurst: f64, alpha: f64, scale: f64) -> Result<Self, SynthError> {
        Self::with_kernel(hurst, alpha, 1.0, 0.0, scale)
    }

    pub fn with_kernel(
        hurst: f64,
        alpha: f64,
        b1: f64,
        b2: f64,
        scale: f64,
    ) -> Result<Self, SynthError> {
        if !(hurst > 0.0 && hurst < 1.0) {
            return Err(SynthError::InvalidSpec(format!(
                "hurst = {hurst} outside (0, 1)"
            )));
        }
        if !(alpha > 0.0 && alpha <= 2.0) {
            return Err(SynthError::InvalidSpec(format!(
                "alpha = {alpha} outside (0, 2]"
            )));
        }
        if b1 == 0.0 && b2 == 0.0 {
            return Err(SynthError::InvalidSpec(
                "kernel coefficients (b1, b2) must not both vanish".into(),
            ));
        }
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(SynthError::InvalidSpec(format!(
                "scale = {scale} must be positive"
            )));
        }
        let d = hurst - 1.0 / alpha;
        if d.abs() >= 1.0 {
            return Err(SynthError::InvalidSpec(format!(
                "memory exponent d = {d} outside (-1, 1); lower hurst or raise alpha"
            )));
        }
        Ok(Self {
            hurst,
            alpha,
            b1,
            b2,
            scale,
        })
    }

    pub fn hurst(&self) -> f64 {
        self.hurst
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn kernel_coefficients(&self) -> (f64, f64) {
        (self.b1, self.b2)
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// d = H - 1/alpha; zero for ordinary Levy motion / Brownian motion.
    pub fn memory_exponent(&self) -> f64 {
        self.hurst - 1.0 / self.alpha
    }
}

/// Discretization knobs of the moving-average synthesis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SynthesisGrid {
    /// number of output increments (the path has n+1 samples)
    pub n: usize,
    /// sub-steps per output step
    pub mesh: usize,
    /// kernel history, in output steps
    pub truncation: usize,
    /// output time step
    pub dt: f64,
    /// innovation stream seed
    pub seed: u64,
}

impl SynthesisGrid {
    /// Default accuracy knobs: mesh 64, truncation 512.
    pub fn new(n: usize, seed: u64) -> Self {
        Self {
            n,
            mesh: 64,
            truncation: 512,
            dt: 1.0,
            seed,
        }
    }

    pub fn with_mesh(mut self, mesh: usize, truncation: usize) -> Self {
        self.mesh = mesh;
        self.truncation = truncation;
        self
    }

    pub fn with_dt(mut self, dt: f64) -> Self {
        self.dt = dt;
        self
    }

    fn validate(&self) -> Result<(), SynthError> {
        if self.n < 1 || self.mesh < 1 || self.truncation < 1 {
            return Err(SynthError::InvalidGrid(
                "n, mesh and truncation must all be >= 1".into(),
            ));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(SynthError::InvalidGrid(format!(
                "dt = {} must be positive",
                self.dt
            )));
        }
        let required = self.mesh as u128 * (self.n as u128 + 2 * self.truncation as u128);
        if required > MAX_INNOVATIONS {
            return Err(SynthError::Capacity { required });
        }
        Ok(())
    }
}

/// Where a path came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Provenance {
    Synthesized { spec: LfsmSpec, grid: SynthesisGrid },
    Imported { hurst: f64, alpha: f64, seed: u64 },
    External,
}

/// A uniformly sampled realization. Synthesized paths start at zero.
#[derive(Debug, Clone)]
pub struct SamplePath {
    pub dt: f64,
    pub values: Vec<f64>,
    pub provenance: Provenance,
}

impl SamplePath {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Discretized causal-branch kernel increments, normalized to unit
/// alpha-norm (so a moving average of standard innovations with these
/// weights has exactly unit scale).
///
/// For `d = 0` the kernel degenerates: the single-tap kernel `[1.0]` is
/// returned and synthesis reduces to a cumulative sum of innovations.
pub fn kernel_weights(
    spec: &LfsmSpec,
    mesh: usize,
    truncation: usize,
) -> Result<Vec<f64>, SynthError> {
    if mesh < 1 || truncation < 1 {
        return Err(SynthError::InvalidGrid(
            "mesh and truncation must be >= 1".into(),
        ));
    }
    let d = spec.memory_exponent();
    if d.abs() < DEGENERATE_D_EPS {
        return Ok(vec![1.0]);
    }
    let len = mesh
        .checked_mul(truncation)
        .ok_or(SynthError::Capacity { required: u128::MAX })?;
    let m = mesh as f64;
    let mut weights = Vec::with_capacity(len);
    for j in 1..=len {
        let lead = (j as f64 / m).powf(d);
        let lag = if j > mesh {
            ((j - mesh) as f64 / m).powf(d)
        } else {
            0.0
        };
        weights.push(lead - lag);
    }
    normalize_alpha_norm(&mut weights, spec.alpha);
    Ok(weights)
}

fn alpha_norm(weights: &[f64], alpha: f64) -> f64 {
    weights
        .iter()
        .map(|w| w.abs().powf(alpha))
        .sum::<f64>()
        .powf(1.0 / alpha)
}

fn normalize_alpha_norm(weights: &mut [f64], alpha: f64) {
    let norm = alpha_norm(weights, alpha);
    for w in weights.iter_mut() {
        *w /= norm;
    }
}

/// Two-sided unit-increment taps with support offsets, for the (b1, b2)
/// kernel mixture. Returns (taps, r_min) where tap index u corresponds to
/// kernel argument r = r_min + u on the sub-grid; taps carry unit
/// alpha-norm.
fn build_taps(spec: &LfsmSpec, mesh: usize, truncation: usize) -> (Vec<f64>, i64) {
    let d = spec.memory_exponent();
    let m = mesh as f64;
    let radius = (mesh * truncation) as i64;
    let pow_plus = |x: f64| if x > 0.0 { x.powf(d) } else { 0.0 };
    let pow_minus = |x: f64| if x < 0.0 { (-x).powf(d) } else { 0.0 };
    let mut taps: Vec<f64> = Vec::with_capacity(2 * radius as usize + 1);
    // causal branch lives on r in [1-mesh, radius-mesh] (mesh*truncation
    // taps, matching kernel_weights), anticausal mirror on [-radius, -1]
    for r in -radius..=(radius - mesh as i64) {
        let v = r as f64 / m;
        let causal = pow_plus(v + 1.0) - pow_plus(v);
        let anticausal = pow_minus(v + 1.0) - pow_minus(v);
        taps.push(spec.b1 * causal + spec.b2 * anticausal);
    }
    // trim zero wings so the causal default keeps its mesh*truncation length
    let first = taps.iter().position(|w| *w != 0.0).unwrap_or(0);
    let last = taps.iter().rposition(|w| *w != 0.0).unwrap_or(taps.len() - 1);
    let r_min = -radius + first as i64;
    let mut taps: Vec<f64> = taps[first..=last].to_vec();
    normalize_alpha_norm(&mut taps, spec.alpha);
    (taps, r_min)
}

/// Smallest 5-smooth integer >= n (FFT-friendly length).
fn next_fast_len(n: usize) -> usize {
    let mut n = n.max(1);
    loop {
        let mut r = n;
        for p in [2, 3, 5] {
            while r % p == 0 {
                r /= p;
            }
        }
        if r == 1 {
            return n;
        }
        n += 1;
    }
}

/// Synthesize a path on `grid`. Deterministic in (spec, grid).
pub fn synthesize_lfsm(spec: &LfsmSpec, grid: &SynthesisGrid) -> Result<SamplePath, SynthError> {
    grid.validate()?;
    let n = grid.n;
    let law = StableLaw::standard(spec.alpha)
        .map_err(|e| SynthError::InvalidSpec(e.to_string()))?;
    let step_scale = spec.scale * grid.dt.powf(spec.hurst);

    let mut values = Vec::with_capacity(n + 1);
    values.push(0.0);

    if spec.memory_exponent().abs() < DEGENERATE_D_EPS {
        // memoryless limit: cumulative sum of innovations
        let mut rng = ChaCha8Rng::seed_from_u64(grid.seed);
        let mut block = Vec::with_capacity(8192.min(n));
        let mut acc = 0.0;
        let mut remaining = n;
        while remaining > 0 {
            let take = remaining.min(8192);
            block.clear();
            fill_stable(&law, &mut rng, take, &mut block);
            for z in &block {
                acc += step_scale * z;
                values.push(acc);
            }
            remaining -= take;
        }
    } else {
        let (taps, _r_min) = build_taps(spec, grid.mesh, grid.truncation);
        let increments = convolve_streaming(&taps, grid.mesh, n, &law, grid.seed)?;
        let mut acc = 0.0;
        for x in increments {
            acc += step_scale * x;
            values.push(acc);
        }
    }

    if values.iter().any(|v| !v.is_finite()) {
        return Err(SynthError::NonFinite);
    }
    Ok(SamplePath {
        dt: grid.dt,
        values,
        provenance: Provenance::Synthesized {
            spec: *spec,
            grid: *grid,
        },
    })
}

/// Overlap-save convolution of the tap array against a streamed innovation
/// sequence, decimated to every `mesh`-th output. Returns the `n` unit-lag
/// increments.
fn convolve_streaming(
    taps: &[f64],
    mesh: usize,
    n: usize,
    law: &StableLaw,
    seed: u64,
) -> Result<Vec<f64>, SynthError> {
    let k_len = taps.len();
    let total_noise: u128 = (n as u128 - 1) * mesh as u128 + k_len as u128;
    if total_noise > MAX_INNOVATIONS {
        return Err(SynthError::Capacity {
            required: total_noise,
        });
    }
    let total_noise = total_noise as usize;

    let fft_len = next_fast_len((4 * k_len).max(1 << 14));
    let block = fft_len - (k_len - 1);

    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_forward(fft_len);
    let ifft = planner.plan_fft_inverse(fft_len);

    // kernel spectrum, with the 1/fft_len inverse-transform factor folded in
    let mut kernel_spec: Vec<Complex<f64>> =
        taps.iter().map(|&w| Complex::new(w, 0.0)).collect();
    kernel_spec.resize(fft_len, Complex::new(0.0, 0.0));
    fft.process(&mut kernel_spec);
    let inv_len = 1.0 / fft_len as f64;
    for c in kernel_spec.iter_mut() {
        *c *= inv_len;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut carry: Vec<f64> = Vec::with_capacity(k_len - 1);
    let mut fresh: Vec<f64> = Vec::with_capacity(block);
    let mut buf: Vec<Complex<f64>> = vec![Complex::new(0.0, 0.0); fft_len];
    let mut scratch = vec![Complex::new(0.0, 0.0); fft.get_inplace_scratch_len().max(ifft.get_inplace_scratch_len())];

    let mut increments = Vec::with_capacity(n);
    let mut produced = 0usize; // innovations drawn so far
    // full-convolution outputs wanted at positions (k-1)*mesh + k_len - 1
    let mut next_output_pos = k_len - 1;

    while produced < total_noise && increments.len() < n {
        let take = block.min(total_noise - produced);
        fresh.clear();
        fill_stable(law, &mut rng, take, &mut fresh);

        let base = produced - carry.len(); // global index of buf[0]
        for c in buf.iter_mut() {
            *c = Complex::new(0.0, 0.0);
        }
        for (i, &z) in carry.iter().enumerate() {
            buf[i] = Complex::new(z, 0.0);
        }
        for (i, &z) in fresh.iter().enumerate() {
            buf[carry.len() + i] = Complex::new(z, 0.0);
        }
        let filled = carry.len() + take;

        fft.process_with_scratch(&mut buf, &mut scratch);
        for (c, k) in buf.iter_mut().zip(&kernel_spec) {
            *c *= k;
        }
        ifft.process_with_scratch(&mut buf, &mut scratch);

        // outputs valid for local positions [k_len-1, filled)
        while increments.len() < n {
            let pos = next_output_pos;
            if pos < base + k_len - 1 || pos >= base + filled {
                break;
            }
            increments.push(buf[pos - base].re);
            next_output_pos += mesh;
        }

        produced += take;
        // retain the trailing k_len-1 innovations for the next block
        let keep = (k_len - 1).min(filled);
        let mut next_carry = Vec::with_capacity(k_len - 1);
        if keep <= take {
            next_carry.extend_from_slice(&fresh[take - keep..]);
        } else {
            next_carry.extend_from_slice(&carry[carry.len() - (keep - take)..]);
            next_carry.extend_from_slice(&fresh[..]);
        }
        carry = next_carry;
    }

    debug_assert_eq!(increments.len(), n);
    Ok(increments)
}

/// Reference direct-sum synthesis, O(n * taps). Test oracle for the FFT
/// path; do not use for long paths.
#[doc(hidden)]
pub fn synthesize_lfsm_direct(
    spec: &LfsmSpec,
    grid: &SynthesisGrid,
) -> Result<SamplePath, SynthError> {
    grid.validate()?;
    let law = StableLaw::standard(spec.alpha)
        .map_err(|e| SynthError::InvalidSpec(e.to_string()))?;
    let step_scale = spec.scale * grid.dt.powf(spec.hurst);
    let mut values = vec![0.0];
    if spec.memory_exponent().abs() < DEGENERATE_D_EPS {
        let z = crate::stable::sample_stable_vector(&law, grid.n, grid.seed);
        let mut acc = 0.0;
        for zi in z {
            acc += step_scale * zi;
            values.push(acc);
        }
    } else {
        let (taps, _) = build_taps(spec, grid.mesh, grid.truncation);
        let k_len = taps.len();
        let total = (grid.n - 1) * grid.mesh + k_len;
        let z = crate::stable::sample_stable_vector(&law, total, grid.seed);
        let mut acc = 0.0;
        for k in 1..=grid.n {
            let t = (k - 1) * grid.mesh + k_len - 1;
            let mut x = 0.0;
            for (u, &w) in taps.iter().enumerate() {
                x += w * z[t - u];
            }
            acc += step_scale * x;
            values.push(acc);
        }
    }
    Ok(SamplePath {
        dt: grid.dt,
        values,
        provenance: Provenance::Synthesized {
            spec: *spec,
            grid: *grid,
        },
    })
}

/// Estimate the self-similarity exponent from the lag scaling of increment
/// quantiles: slope of `log q-quantile(|x(t+lag) - x(t)|)` against
/// `log lag`. Quantiles rather than variances keep the estimate finite for
/// alpha < 2.
pub fn estimate_hurst(path: &SamplePath, lags: &[usize], q: f64) -> Result<f64, SynthError> {
    if lags.len() < 3 {
        return Err(SynthError::Estimation(format!(
            "need >= 3 lags, got {}",
            lags.len()
        )));
    }
    if !(q > 0.0 && q < 1.0) {
        return Err(SynthError::Estimation(format!(
            "quantile level q = {q} outside (0, 1)"
        )));
    }
    let n = path.values.len();
    let mut log_lag = Vec::with_capacity(lags.len());
    let mut log_q = Vec::with_capacity(lags.len());
    for &lag in lags {
        if lag == 0 || n <= lag || n - lag < MIN_INCREMENTS_PER_LAG {
            return Err(SynthError::Estimation(format!(
                "lag {lag} leaves fewer than {MIN_INCREMENTS_PER_LAG} increments"
            )));
        }
        let abs_inc: Vec<f64> = (0..n - lag)
            .map(|i| (path.values[i + lag] - path.values[i]).abs())
            .collect();
        let quant = stats::quantile(&abs_inc, q);
        if !(quant > 0.0) {
            return Err(SynthError::Estimation(format!(
                "non-positive increment quantile at lag {lag}"
            )));
        }
        log_lag.push((lag as f64).ln());
        log_q.push(quant.ln());
    }
    let (slope, _) = stats::ols(&log_lag, &log_q);
    Ok(slope)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_validation() {
        assert!(LfsmSpec::new(0.0, 2.0).is_err());
        assert!(LfsmSpec::new(0.5, 0.0).is_err());
        assert!(LfsmSpec::new(0.5, 2.1).is_err());
        assert!(LfsmSpec::with_kernel(0.5, 2.0, 0.0, 0.0, 1.0).is_err());
        // alpha < 1 can push |d| past 1
        assert!(LfsmSpec::new(0.1, 0.5).is_err());
        let s = LfsmSpec::new(0.7, 1.5).unwrap();
        assert!((s.memory_exponent() - (0.7 - 1.0 / 1.5)).abs() < 1e-15);
    }

    #[test]
    fn unnormalized_kernel_matches_difference_formula() {
        // H=0.8, alpha=2, m=1, M=3: (1^0.3, 2^0.3 - 1^0.3, 3^0.3 - 2^0.3)
        let spec = LfsmSpec::new(0.8, 2.0).unwrap();
        let w = kernel_weights(&spec, 1, 3).unwrap();
        let raw = [
            1.0,
            2f64.powf(0.3) - 1.0,
            3f64.powf(0.3) - 2f64.powf(0.3),
        ];
        let norm = raw.iter().map(|x| x * x).sum::<f64>().sqrt();
        for (got, want) in w.iter().zip(raw.iter().map(|x| x / norm)) {
            assert!((got - want).abs() < 1e-14, "{got} vs {want}");
        }
    }

    #[test]
    fn degenerate_kernel_is_single_tap() {
        let spec = LfsmSpec::new(0.5, 2.0).unwrap(); // d = 0
        assert_eq!(kernel_weights(&spec, 16, 64).unwrap(), vec![1.0]);
        let olm = LfsmSpec::new(1.0 / 1.5, 1.5).unwrap(); // H = 1/alpha
        assert!(olm.memory_exponent().abs() < 1e-12);
        assert_eq!(kernel_weights(&olm, 16, 64).unwrap(), vec![1.0]);
    }

    #[test]
    fn normalized_weights_have_unit_alpha_norm() {
        let spec = LfsmSpec::new(0.7, 1.5).unwrap();
        let w = kernel_weights(&spec, 16, 128).unwrap();
        assert_eq!(w.len(), 16 * 128);
        // independent recomputation of the norm
        let norm: f64 = w.iter().map(|x| x.abs().powf(1.5)).sum();
        assert!((norm - 1.0).abs() < 1e-12, "alpha-norm^alpha = {norm}");
    }

    #[test]
    fn causal_taps_agree_with_kernel_weights() {
        let spec = LfsmSpec::new(0.75, 1.8).unwrap();
        let w = kernel_weights(&spec, 8, 32).unwrap();
        let (taps, r_min) = build_taps(&spec, 8, 32);
        assert_eq!(taps.len(), w.len());
        assert_eq!(r_min, 1 - 8);
        // tap u sits at r = r_min + u = j - mesh, so orders coincide
        for (u, tap) in taps.iter().enumerate() {
            assert!((tap - w[u]).abs() < 1e-14, "tap {u}: {tap} vs {}", w[u]);
        }
    }

    #[test]
    fn fft_convolution_matches_direct_sum() {
        for &(h, a, b1, b2) in &[
            (0.75, 2.0, 1.0, 0.0),
            (0.3, 1.5, 1.0, 0.0),
            (0.7, 1.2, 1.0, 0.0),
            (0.6, 1.7, 1.0, 0.5),
            (0.4, 2.0, 0.0, 1.0),
        ] {
            let spec = LfsmSpec::with_kernel(h, a, b1, b2, 1.0).unwrap();
            let grid = SynthesisGrid::new(200, 77).with_mesh(4, 16);
            let fast = synthesize_lfsm(&spec, &grid).unwrap();
            let slow = synthesize_lfsm_direct(&spec, &grid).unwrap();
            let scale: f64 = slow.values.iter().fold(1.0f64, |m, v| m.max(v.abs()));
            for (i, (x, y)) in fast.values.iter().zip(&slow.values).enumerate() {
                assert!(
                    (x - y).abs() <= 1e-10 * scale,
                    "H={h} alpha={a} b=({b1},{b2}) sample {i}: {x} vs {y}"
                );
            }
        }
    }

    #[test]
    fn synthesis_is_deterministic() {
        let spec = LfsmSpec::new(0.7, 1.5).unwrap();
        let grid = SynthesisGrid::new(256, 4242).with_mesh(8, 32);
        let a = synthesize_lfsm(&spec, &grid).unwrap();
        let b = synthesize_lfsm(&spec, &grid).unwrap();
        assert_eq!(a.values, b.values);
        assert_eq!(a.values[0], 0.0);
    }

    #[test]
    fn capacity_error_on_absurd_grids() {
        let grid = SynthesisGrid {
            n: usize::MAX / 2,
            mesh: 1 << 20,
            truncation: 512,
            dt: 1.0,
            seed: 0,
        };
        assert!(matches!(
            grid.validate(),
            Err(SynthError::Capacity { .. })
        ));
    }

    #[test]
    fn hurst_of_linear_path_is_one() {
        let values: Vec<f64> = (0..1025).map(|i| i as f64).collect();
        let path = SamplePath {
            dt: 1.0,
            values,
            provenance: Provenance::External,
        };
        let h = estimate_hurst(&path, &[1, 2, 4, 8, 16], 0.5).unwrap();
        assert!((h - 1.0).abs() < 1e-12, "slope = {h}");
    }

    #[test]
    fn hurst_estimator_input_validation() {
        let path = SamplePath {
            dt: 1.0,
            values: vec![0.0; 32],
            provenance: Provenance::External,
        };
        assert!(estimate_hurst(&path, &[1, 2], 0.5).is_err());
        assert!(estimate_hurst(&path, &[1, 2, 31], 0.5).is_err());
        assert!(estimate_hurst(&path, &[1, 2, 4], 1.5).is_err());
        // constant path: zero quantiles
        assert!(estimate_hurst(&path, &[1, 2, 4], 0.5).is_err());
    }

    #[test]
    fn next_fast_len_is_5_smooth_and_monotone() {
        for &(n, want) in &[(1, 1), (7, 8), (17, 18), (121, 125)] {
            assert_eq!(next_fast_len(n), want);
        }
        for n in [16385usize, 99999] {
            let got = next_fast_len(n);
            assert!(got >= n);
            let mut r = got;
            for p in [2, 3, 5] {
                while r % p == 0 {
                    r /= p;
                }
            }
            assert_eq!(r, 1, "{got} not 5-smooth");
        }
    }
}
