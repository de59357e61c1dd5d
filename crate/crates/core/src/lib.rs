//! lfsmlab: a simulation and analysis laboratory for linear fractional
//! stable motion.
//!
//! The crate synthesizes H-self-similar alpha-stable sample paths through
//! a moving-average kernel, evaluates the process pdf from its
//! characteristic function and verifies the associated space-fractional
//! kinetic equation numerically, and measures the scaling of
//! threshold-crossing bursts (durations, sizes, size-vs-duration growth)
//! against the predicted exponent curves beta = 2 - H, |gamma| = 2/(1+H),
//! psi = 1 + H.
//!
//! Modules:
//! - [`stable`]: symmetric alpha-stable variates (innovations);
//! - [`synth`]: path synthesis and Hurst estimation;
//! - [`pathio`]: CSV / binary path files;
//! - [`kinetics`]: cf-based pdf, Riesz operator, kinetic-equation residual;
//! - [`bursts`]: threshold excursions and their exponents;
//! - [`tailfit`]: power-law MLE with KS-selected cutoff;
//! - [`harness`]: (alpha, H) sweeps, aggregates, figure tables;
//! - [`stats`]: shared quantile/regression/KS helpers.

pub mod bursts;
pub mod harness;
pub mod kinetics;
pub mod pathio;
pub mod stable;
pub mod stats;
pub mod synth;
pub mod tailfit;

pub use bursts::{find_bursts, predicted_exponents, Burst, BurstEnsemble};
pub use harness::{run_sweep, SweepConfig, SweepResult};
pub use kinetics::{cf_pdf, kinetic_residual, riesz_apply, PdfSpec, XGrid};
pub use stable::{sample_stable_vector, sample_standard_stable, StableLaw};
pub use synth::{estimate_hurst, kernel_weights, synthesize_lfsm, LfsmSpec, SamplePath, SynthesisGrid};
pub use tailfit::{fit_exponent, ks_distance, select_xmin, TailFit};
