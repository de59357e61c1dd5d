//! Sweep orchestration: (alpha, H) grids, repeated trials, burst-exponent
//! fits, aggregates against the predicted curves, and figure-data tables.
//!
//! Every cell (alpha, H, trial) is an independent job with a seed derived
//! from the base seed and the cell coordinates, so any cell can be
//! reproduced in isolation and the full sweep is deterministic regardless
//! of scheduling.

use crate::bursts::{
    self, duration_exponent_with_floor, find_bursts, size_duration_exponent,
    size_exponent_with_floor, predicted_exponents,
};
use crate::stats;
use crate::synth::{synthesize_lfsm, LfsmSpec, SynthError, SynthesisGrid};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("invalid sweep config: {0}")]
    Config(String),
    #[error(transparent)]
    Synth(#[from] SynthError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("no sweep data for alpha = {0}")]
    MissingAlpha(f64),
    #[error("unknown figure id {0} (known: 1-11)")]
    UnknownFigure(u32),
    #[error("malformed sweep file: {0}")]
    Malformed(String),
}

/// Configuration of a burst-scaling sweep.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct SweepConfig {
    /// stability exponents to sweep
    pub alphas: Vec<f64>,
    /// Hurst exponents to sweep
    pub hursts: Vec<f64>,
    /// independent trials per cell; cell results are trial means
    pub trials: usize,
    /// output increments per path
    pub path_length: usize,
    /// burst threshold
    pub threshold: f64,
    /// base seed; per-cell seeds are derived from it
    pub base_seed: u64,
    /// synthesis mesh (sub-steps per unit step) used by the sweep
    pub mesh: usize,
    /// kernel history in unit steps
    pub kernel_truncation: usize,
    /// tail-size floor for the xmin scan; small ensembles shrink it
    /// adaptively down to [`MIN_TAIL_FLOOR`]
    pub min_tail: usize,
}

/// Hard lower bound of the adaptive tail floor.
pub const MIN_TAIL_FLOOR: usize = 8;

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            alphas: vec![2.0, 1.8, 1.6, 1.0],
            hursts: (1..=9).map(|i| i as f64 / 10.0).collect(),
            trials: 7,
            path_length: 1 << 20,
            threshold: 0.0,
            base_seed: 1,
            mesh: 16,
            kernel_truncation: 512,
            min_tail: 50,
        }
    }
}

impl SweepConfig {
    pub fn validate(&self) -> Result<(), SweepError> {
        if self.alphas.is_empty() || self.hursts.is_empty() {
            return Err(SweepError::Config("empty alpha or hurst grid".into()));
        }
        for &a in &self.alphas {
            if !(a > 0.0 && a <= 2.0) {
                return Err(SweepError::Config(format!("alpha = {a} outside (0, 2]")));
            }
        }
        for &h in &self.hursts {
            if !(h > 0.0 && h < 1.0) {
                return Err(SweepError::Config(format!("hurst = {h} outside (0, 1)")));
            }
        }
        if self.trials < 1 {
            return Err(SweepError::Config("trials must be >= 1".into()));
        }
        if self.path_length < 2 {
            return Err(SweepError::Config("path_length must be >= 2".into()));
        }
        Ok(())
    }

    /// Effective xmin-scan floor for an ensemble of `n_bursts` bursts:
    /// the configured floor, shrunk to n_bursts/4 (but never below
    /// [`MIN_TAIL_FLOOR`]) when the ensemble is small. High-H cells of a
    /// self-similar path produce few excursions; a rigid floor of 50 would
    /// null them out instead of fitting the tail that is there.
    pub fn effective_min_tail(&self, n_bursts: usize) -> usize {
        self.min_tail.min((n_bursts / 4).max(MIN_TAIL_FLOOR))
    }
}

/// splitmix64 finalizer.
fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Per-cell seed: a splitmix64 chain over (base, alpha index, hurst index,
/// trial). Stable across platforms and releases.
pub fn derive_seed(base: u64, alpha_idx: usize, hurst_idx: usize, trial: usize) -> u64 {
    let mut s = mix64(base);
    s = mix64(s ^ mix64(alpha_idx as u64 ^ 0xA1FA_0001));
    s = mix64(s ^ mix64(hurst_idx as u64 ^ 0x0085_BEEF));
    s = mix64(s ^ mix64(trial as u64 ^ 0x7121_AB1E));
    s
}

/// One (alpha, hurst, trial) measurement. Failed fits are `None` and the
/// row is flagged, never fatal.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct TrialRow {
    pub alpha: f64,
    pub hurst: f64,
    pub trial: usize,
    pub seed: u64,
    pub n_bursts: usize,
    pub beta_hat: Option<f64>,
    pub beta_stderr: Option<f64>,
    pub gamma_hat: Option<f64>,
    pub gamma_stderr: Option<f64>,
    pub psi_hat: Option<f64>,
    pub xmin_tau: Option<f64>,
    pub xmin_s: Option<f64>,
    pub low_confidence: bool,
}

/// Trial means and spreads for one (alpha, hurst) cell, next to the
/// predicted curves.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct CellAggregate {
    pub alpha: f64,
    pub hurst: f64,
    pub n_trials: usize,
    pub n_beta: usize,
    pub beta_mean: Option<f64>,
    pub beta_std: Option<f64>,
    pub n_gamma: usize,
    pub gamma_mean: Option<f64>,
    pub gamma_std: Option<f64>,
    pub n_psi: usize,
    pub psi_mean: Option<f64>,
    pub psi_std: Option<f64>,
    pub beta_predicted: f64,
    pub gamma_predicted: f64,
    pub psi_predicted: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepResult {
    pub config: SweepConfig,
    pub rows: Vec<TrialRow>,
    pub aggregates: Vec<CellAggregate>,
}

/// Run one cell: synthesize, extract bursts, fit the three exponents.
pub fn run_cell(cfg: &SweepConfig, alpha_idx: usize, hurst_idx: usize, trial: usize) -> TrialRow {
    let alpha = cfg.alphas[alpha_idx];
    let hurst = cfg.hursts[hurst_idx];
    let seed = derive_seed(cfg.base_seed, alpha_idx, hurst_idx, trial);
    let mut row = TrialRow {
        alpha,
        hurst,
        trial,
        seed,
        n_bursts: 0,
        beta_hat: None,
        beta_stderr: None,
        gamma_hat: None,
        gamma_stderr: None,
        psi_hat: None,
        xmin_tau: None,
        xmin_s: None,
        low_confidence: true,
    };
    let spec = match LfsmSpec::new(hurst, alpha) {
        Ok(s) => s,
        Err(_) => return row,
    };
    let grid = SynthesisGrid {
        n: cfg.path_length,
        mesh: cfg.mesh,
        truncation: cfg.kernel_truncation,
        dt: 1.0,
        seed,
    };
    let path = match synthesize_lfsm(&spec, &grid) {
        Ok(p) => p,
        Err(_) => return row,
    };
    let ens = find_bursts(&path, cfg.threshold);
    row.n_bursts = ens.len();
    row.low_confidence = ens.len() < bursts::MIN_BURSTS;
    let floor = cfg.effective_min_tail(ens.len());
    if let Ok(fit) = duration_exponent_with_floor(&ens, floor) {
        row.beta_hat = Some(fit.exponent);
        row.beta_stderr = Some(fit.stderr);
        row.xmin_tau = Some(fit.xmin);
    }
    if let Ok(fit) = size_exponent_with_floor(&ens, floor) {
        row.gamma_hat = Some(fit.exponent);
        row.gamma_stderr = Some(fit.stderr);
        row.xmin_s = Some(fit.xmin);
    }
    if let Ok(psi) = size_duration_exponent(&ens) {
        row.psi_hat = Some(psi);
    }
    row
}

/// Run the whole sweep. Cells execute on the rayon pool; rows are keyed and
/// sorted, so the result is identical for any schedule.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepResult, SweepError> {
    cfg.validate()?;
    let cells: Vec<(usize, usize, usize)> = (0..cfg.alphas.len())
        .flat_map(|a| {
            (0..cfg.hursts.len())
                .flat_map(move |h| (0..cfg.trials).map(move |t| (a, h, t)))
        })
        .collect();
    let mut rows: Vec<((usize, usize, usize), TrialRow)> = cells
        .par_iter()
        .map(|&(a, h, t)| ((a, h, t), run_cell(cfg, a, h, t)))
        .collect();
    rows.sort_by_key(|(key, _)| *key);
    let rows: Vec<TrialRow> = rows.into_iter().map(|(_, r)| r).collect();
    let aggregates = aggregate_rows(cfg, &rows);
    Ok(SweepResult {
        config: cfg.clone(),
        rows,
        aggregates,
    })
}

/// Recompute per-cell aggregates from rows (also used to check stored
/// aggregates for consistency).
pub fn aggregate_rows(cfg: &SweepConfig, rows: &[TrialRow]) -> Vec<CellAggregate> {
    let mut out = Vec::new();
    for &alpha in &cfg.alphas {
        for &hurst in &cfg.hursts {
            let cell: Vec<&TrialRow> = rows
                .iter()
                .filter(|r| r.alpha == alpha && r.hurst == hurst)
                .collect();
            if cell.is_empty() {
                continue;
            }
            let collect = |f: fn(&TrialRow) -> Option<f64>| -> Vec<f64> {
                cell.iter().filter_map(|r| f(r)).collect()
            };
            let betas = collect(|r| r.beta_hat);
            let gammas = collect(|r| r.gamma_hat);
            let psis = collect(|r| r.psi_hat);
            let stats_of = |v: &[f64]| {
                if v.is_empty() {
                    (None, None)
                } else {
                    (Some(stats::mean(v)), Some(stats::std_dev(v)))
                }
            };
            let (beta_mean, beta_std) = stats_of(&betas);
            let (gamma_mean, gamma_std) = stats_of(&gammas);
            let (psi_mean, psi_std) = stats_of(&psis);
            let (bp, gp, pp) =
                predicted_exponents(hurst).expect("config validated hurst domain");
            out.push(CellAggregate {
                alpha,
                hurst,
                n_trials: cell.len(),
                n_beta: betas.len(),
                beta_mean,
                beta_std,
                n_gamma: gammas.len(),
                gamma_mean,
                gamma_std,
                n_psi: psis.len(),
                psi_mean,
                psi_std,
                beta_predicted: bp,
                gamma_predicted: gp,
                psi_predicted: pp,
            });
        }
    }
    out
}

// ---------------------------------------------------------------------------
// figure tables

/// Which exponent a figure plots.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FigureKind {
    Beta,
    Gamma,
    Psi,
}

/// (figure id) -> (exponent, alpha, single-trial?)
fn figure_map(id: u32) -> Result<(FigureKind, f64, bool), SweepError> {
    Ok(match id {
        1 => (FigureKind::Beta, 2.0, false),
        2 => (FigureKind::Gamma, 2.0, false),
        3 => (FigureKind::Beta, 2.0, true),
        4 => (FigureKind::Gamma, 2.0, true),
        5 => (FigureKind::Psi, 2.0, false),
        6 => (FigureKind::Beta, 1.8, false),
        7 => (FigureKind::Gamma, 1.8, false),
        8 => (FigureKind::Beta, 1.6, false),
        9 => (FigureKind::Gamma, 1.6, false),
        10 => (FigureKind::Beta, 1.0, false),
        11 => (FigureKind::Gamma, 1.0, false),
        other => return Err(SweepError::UnknownFigure(other)),
    })
}

/// One plottable row: H, measured trial-mean exponent magnitude, predicted
/// curve value.
#[derive(Debug, Clone, Serialize)]
pub struct FigurePoint {
    pub hurst: f64,
    pub measured: Option<f64>,
    pub predicted: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct FigureTable {
    pub figure: u32,
    pub alpha: f64,
    pub kind: FigureKind,
    pub points: Vec<FigurePoint>,
}

/// Assemble the data behind one of the survey figures: exponent magnitude
/// against H for one alpha, next to the predicted curve.
pub fn figure_data(result: &SweepResult, figure: u32) -> Result<FigureTable, SweepError> {
    let (kind, alpha, single_trial) = figure_map(figure)?;
    if !result.config.alphas.iter().any(|&a| a == alpha) {
        return Err(SweepError::MissingAlpha(alpha));
    }
    let mut points = Vec::new();
    for &hurst in &result.config.hursts {
        let (bp, gp, pp) = predicted_exponents(hurst)
            .map_err(|e| SweepError::Config(e.to_string()))?;
        let predicted = match kind {
            FigureKind::Beta => bp,
            FigureKind::Gamma => gp,
            FigureKind::Psi => pp,
        };
        let measured = if single_trial {
            result
                .rows
                .iter()
                .find(|r| r.alpha == alpha && r.hurst == hurst && r.trial == 0)
                .and_then(|r| match kind {
                    FigureKind::Beta => r.beta_hat,
                    FigureKind::Gamma => r.gamma_hat,
                    FigureKind::Psi => r.psi_hat,
                })
        } else {
            result
                .aggregates
                .iter()
                .find(|c| c.alpha == alpha && c.hurst == hurst)
                .and_then(|c| match kind {
                    FigureKind::Beta => c.beta_mean,
                    FigureKind::Gamma => c.gamma_mean,
                    FigureKind::Psi => c.psi_mean,
                })
        };
        points.push(FigurePoint {
            hurst,
            measured,
            predicted,
        });
    }
    if points.iter().all(|p| p.measured.is_none()) {
        return Err(SweepError::MissingAlpha(alpha));
    }
    Ok(FigureTable {
        figure,
        alpha,
        kind,
        points,
    })
}

// ---------------------------------------------------------------------------
// output files

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn parse_opt(s: &str) -> Result<Option<f64>, SweepError> {
    if s.is_empty() {
        Ok(None)
    } else {
        s.parse()
            .map(Some)
            .map_err(|_| SweepError::Malformed(format!("bad float: {s}")))
    }
}

/// Write `sweep.csv`, `aggregates.csv` and `manifest.json` into `dir`.
pub fn write_outputs(result: &SweepResult, dir: &Path) -> Result<(), SweepError> {
    std::fs::create_dir_all(dir)?;
    let mut w = csv::Writer::from_path(dir.join("sweep.csv"))?;
    w.write_record([
        "alpha",
        "hurst",
        "trial",
        "seed",
        "n_bursts",
        "beta_hat",
        "beta_stderr",
        "gamma_hat",
        "gamma_stderr",
        "psi_hat",
        "xmin_tau",
        "xmin_s",
        "low_confidence",
    ])?;
    for r in &result.rows {
        w.write_record([
            r.alpha.to_string(),
            r.hurst.to_string(),
            r.trial.to_string(),
            r.seed.to_string(),
            r.n_bursts.to_string(),
            fmt_opt(r.beta_hat),
            fmt_opt(r.beta_stderr),
            fmt_opt(r.gamma_hat),
            fmt_opt(r.gamma_stderr),
            fmt_opt(r.psi_hat),
            fmt_opt(r.xmin_tau),
            fmt_opt(r.xmin_s),
            r.low_confidence.to_string(),
        ])?;
    }
    w.flush()?;

    let mut w = csv::Writer::from_path(dir.join("aggregates.csv"))?;
    w.write_record([
        "alpha",
        "hurst",
        "n_trials",
        "n_beta",
        "beta_mean",
        "beta_std",
        "n_gamma",
        "gamma_mean",
        "gamma_std",
        "n_psi",
        "psi_mean",
        "psi_std",
        "beta_predicted",
        "gamma_predicted",
        "psi_predicted",
    ])?;
    for c in &result.aggregates {
        w.write_record([
            c.alpha.to_string(),
            c.hurst.to_string(),
            c.n_trials.to_string(),
            c.n_beta.to_string(),
            fmt_opt(c.beta_mean),
            fmt_opt(c.beta_std),
            c.n_gamma.to_string(),
            fmt_opt(c.gamma_mean),
            fmt_opt(c.gamma_std),
            c.n_psi.to_string(),
            fmt_opt(c.psi_mean),
            fmt_opt(c.psi_std),
            c.beta_predicted.to_string(),
            c.gamma_predicted.to_string(),
            c.psi_predicted.to_string(),
        ])?;
    }
    w.flush()?;

    // manifest: config echo, code version, per-cell seeds
    #[derive(Serialize)]
    struct CellSeed {
        alpha: f64,
        hurst: f64,
        trial: usize,
        seed: u64,
    }
    #[derive(Serialize)]
    struct Manifest<'a> {
        version: &'static str,
        config: &'a SweepConfig,
        cells: Vec<CellSeed>,
    }
    let cells = result
        .rows
        .iter()
        .map(|r| CellSeed {
            alpha: r.alpha,
            hurst: r.hurst,
            trial: r.trial,
            seed: r.seed,
        })
        .collect();
    let manifest = Manifest {
        version: env!("CARGO_PKG_VERSION"),
        config: &result.config,
        cells,
    };
    let mut f = std::fs::File::create(dir.join("manifest.json"))?;
    serde_json::to_writer_pretty(&mut f, &manifest)
        .map_err(|e| SweepError::Malformed(e.to_string()))?;
    writeln!(f)?;
    Ok(())
}

/// Load a sweep written by [`write_outputs`] back from disk (used by the
/// `figure` subcommand).
pub fn read_outputs(dir: &Path) -> Result<SweepResult, SweepError> {
    let manifest_text = std::fs::read_to_string(dir.join("manifest.json"))?;
    #[derive(Deserialize)]
    struct ManifestIn {
        config: SweepConfig,
    }
    let manifest: ManifestIn = serde_json::from_str(&manifest_text)
        .map_err(|e| SweepError::Malformed(format!("manifest.json: {e}")))?;
    let mut rows = Vec::new();
    let mut r = csv::Reader::from_path(dir.join("sweep.csv"))?;
    for record in r.records() {
        let record = record?;
        let get = |i: usize| -> Result<&str, SweepError> {
            record
                .get(i)
                .ok_or_else(|| SweepError::Malformed("short row in sweep.csv".into()))
        };
        rows.push(TrialRow {
            alpha: get(0)?.parse().map_err(|_| SweepError::Malformed("alpha".into()))?,
            hurst: get(1)?.parse().map_err(|_| SweepError::Malformed("hurst".into()))?,
            trial: get(2)?.parse().map_err(|_| SweepError::Malformed("trial".into()))?,
            seed: get(3)?.parse().map_err(|_| SweepError::Malformed("seed".into()))?,
            n_bursts: get(4)?
                .parse()
                .map_err(|_| SweepError::Malformed("n_bursts".into()))?,
            beta_hat: parse_opt(get(5)?)?,
            beta_stderr: parse_opt(get(6)?)?,
            gamma_hat: parse_opt(get(7)?)?,
            gamma_stderr: parse_opt(get(8)?)?,
            psi_hat: parse_opt(get(9)?)?,
            xmin_tau: parse_opt(get(10)?)?,
            xmin_s: parse_opt(get(11)?)?,
            low_confidence: get(12)?
                .parse()
                .map_err(|_| SweepError::Malformed("low_confidence".into()))?,
        });
    }
    let aggregates = aggregate_rows(&manifest.config, &rows);
    Ok(SweepResult {
        config: manifest.config,
        rows,
        aggregates,
    })
}

/// Write one figure table as CSV: `hurst,measured,predicted`.
pub fn write_figure_csv(table: &FigureTable, path: &Path) -> Result<(), SweepError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["hurst", "measured", "predicted"])?;
    for p in &table.points {
        w.write_record([
            p.hurst.to_string(),
            fmt_opt(p.measured),
            p.predicted.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeds_are_stable_and_distinct() {
        let s = derive_seed(1, 0, 0, 0);
        assert_eq!(s, derive_seed(1, 0, 0, 0));
        let mut all = vec![];
        for a in 0..3 {
            for h in 0..3 {
                for t in 0..3 {
                    all.push(derive_seed(1, a, h, t));
                }
            }
        }
        all.sort_unstable();
        all.dedup();
        assert_eq!(all.len(), 27, "seed collisions");
    }

    #[test]
    fn config_validation() {
        let mut cfg = SweepConfig::default();
        assert!(cfg.validate().is_ok());
        cfg.hursts = vec![1.5];
        assert!(cfg.validate().is_err());
        cfg.hursts = vec![];
        assert!(cfg.validate().is_err());
        let cfg = SweepConfig {
            trials: 0,
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn adaptive_floor_behaviour() {
        let cfg = SweepConfig::default();
        assert_eq!(cfg.effective_min_tail(10_000), 50);
        assert_eq!(cfg.effective_min_tail(120), 30);
        assert_eq!(cfg.effective_min_tail(20), MIN_TAIL_FLOOR);
    }

    #[test]
    fn tiny_sweep_runs_and_flags_low_confidence() {
        let cfg = SweepConfig {
            alphas: vec![2.0],
            hursts: vec![0.5],
            trials: 2,
            path_length: 256,
            mesh: 2,
            kernel_truncation: 16,
            ..Default::default()
        };
        let result = run_sweep(&cfg).unwrap();
        assert_eq!(result.rows.len(), 2);
        for row in &result.rows {
            // 256 samples cannot produce 500 bursts
            assert!(row.low_confidence);
            assert!(row.n_bursts > 0);
        }
        assert_eq!(result.aggregates.len(), 1);
    }

    #[test]
    fn figure_lookup_errors() {
        let cfg = SweepConfig {
            alphas: vec![2.0],
            hursts: vec![0.5],
            trials: 1,
            path_length: 128,
            mesh: 1,
            kernel_truncation: 8,
            ..Default::default()
        };
        let result = run_sweep(&cfg).unwrap();
        assert!(matches!(
            figure_data(&result, 10),
            Err(SweepError::MissingAlpha(_))
        ));
        assert!(matches!(
            figure_data(&result, 12),
            Err(SweepError::UnknownFigure(12))
        ));
        let empty = SweepResult {
            config: cfg.clone(),
            rows: vec![],
            aggregates: vec![],
        };
        assert!(figure_data(&empty, 1).is_err());
    }

    #[test]
    fn aggregates_recompute_from_rows() {
        let cfg = SweepConfig {
            alphas: vec![2.0],
            hursts: vec![0.3, 0.5],
            trials: 3,
            path_length: 4096,
            mesh: 2,
            kernel_truncation: 32,
            ..Default::default()
        };
        let result = run_sweep(&cfg).unwrap();
        let re = aggregate_rows(&cfg, &result.rows);
        assert_eq!(re, result.aggregates);
    }
}
