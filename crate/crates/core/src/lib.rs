//! Confidence calibration for classifiers whose deployment distribution has
//! drifted away from their training distribution.
//!
//! The core object is a temperature: dividing a classifier's logits by a
//! scalar `t > 1` softens its probabilities, `t < 1` sharpens them, and
//! neither changes any predicted class. [`calibration`] fits the temperature
//! that minimizes negative log-likelihood on labeled data. When the data of
//! interest (the *target* domain) is unlabeled, [`calibrators`] offers ways
//! to transfer a temperature from labeled *calibration* domains instead of
//! falling back to the training domain's temperature: one pooled
//! temperature, per-cluster temperatures looked up by nearest centroid, a
//! regression from cluster mean features to temperature, or an ensemble of
//! those.
//!
//! Around that sit [`metrics`] (expected calibration error and a seeded
//! bootstrap protocol), [`diagnostics`] (density-ratio statistics that
//! bound how far a calibration fit can be trusted across a shift),
//! [`dataset`] (CSV and binary I/O with per-domain splits), [`clustering`]
//! (k-means), [`synth`] (shift scenarios with known ground truth), and
//! [`rng`] (the deterministic generator everything draws from).
//!
//! Determinism is a contract, not an accident: every random choice flows
//! from an explicit `u64` seed through [`rng::derive_seed`], so equal
//! inputs and seeds give byte-equal outputs on every platform.
//!
//! # Example
//!
//! Synthesize a covariate-shift scenario, fit a transfer calibrator on the
//! labeled calibration pool, and confirm it beats the source-only baseline
//! on the target split it never saw:
//!
//! ```
//! use shiftcal::calibrators::{fit_set_level, fit_source_only};
//! use shiftcal::metrics::bootstrap_eval;
//! use shiftcal::synth::{make_scenario, preset};
//! use shiftcal::{BootstrapConfig, Calibrator, FitOptions};
//!
//! let scenario = make_scenario(&preset("bridge")?)?;
//! let opts = FitOptions::default();
//! let transfer = fit_set_level(&scenario.cal_small, &opts)?;
//! let baseline = fit_source_only(&scenario.source_small, &opts)?;
//!
//! let config = BootstrapConfig {
//!     n_trials: 50,
//!     trial_size: 200,
//!     ..BootstrapConfig::default()
//! };
//! let mut score =
//!     |c: &Calibrator| bootstrap_eval(&scenario.target_large, &config, |s| c.apply(s));
//! assert!(score(&transfer)?.ece_mean < score(&baseline)?.ece_mean);
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```

pub mod calibration;
pub mod calibrators;
pub mod clustering;
pub mod dataset;
pub mod diagnostics;
mod linalg;
pub mod metrics;
pub mod rng;
pub mod synth;

pub use calibration::{Prediction, TemperatureModel};
pub use calibrators::{Calibrator, FitOptions};
pub use dataset::DomainDataset;
pub use metrics::{BootstrapConfig, EvaluationReport};
