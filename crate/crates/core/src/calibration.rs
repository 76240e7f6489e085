//! Temperature scaling of classifier logits.
//!
//! A classifier emits a logit vector `z` per input; the calibrated predictive
//! distribution is `softmax(z / t)` for a temperature `t > 0`. Temperatures
//! above 1 flatten the distribution (less confident), temperatures below 1
//! sharpen it, and the argmax is unchanged for every `t`, so calibration never
//! alters which class is predicted, only how much confidence is attached.
//!
//! [`fit_temperature`] picks `t` by minimizing mean negative log-likelihood on
//! a labeled batch. The objective is convex in `1 / t`, hence unimodal in
//! `log t`, so a golden-section search on `u = log t` over a bounded interval
//! finds the optimum without gradients. The returned value is the best of the
//! interior search result, the two interval endpoints, and `t = 1` (when in
//! range), which guarantees the fit never does worse than leaving the logits
//! alone.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default temperature search interval.
pub const DEFAULT_BOUNDS: (f64, f64) = (1e-2, 1e2);

/// Default golden-section tolerance, as a width in `log t` space.
pub const DEFAULT_TOL: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum CalibrationError {
    #[error("logit vector has {0} entries; at least 2 classes are required")]
    TooFewClasses(usize),
    #[error("logit vector contains a non-finite value")]
    NonFiniteLogit,
    #[error("temperature must be finite and positive, got {0}")]
    InvalidTemperature(f64),
    #[error("batch is empty")]
    EmptyBatch,
    #[error("batch has {logits} logit rows but {labels} labels")]
    LengthMismatch { logits: usize, labels: usize },
    #[error("label {label} out of range for {num_classes} classes (batch row {row})")]
    LabelOutOfRange {
        row: usize,
        label: usize,
        num_classes: usize,
    },
    #[error("logit rows differ in length (row {row}: {got}, expected {expected})")]
    RaggedBatch {
        row: usize,
        got: usize,
        expected: usize,
    },
    #[error("search bounds must satisfy 0 < lo < hi and be finite, got ({0}, {1})")]
    InvalidBounds(f64, f64),
    #[error("tolerance must be finite and positive, got {0}")]
    InvalidTolerance(f64),
    #[error("weight vector has {weights} entries for {rows} rows")]
    WeightLengthMismatch { weights: usize, rows: usize },
    #[error("weights must be finite, non-negative, and not all zero")]
    InvalidWeights,
}

/// A fitted temperature plus fit metadata.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TemperatureModel {
    /// The selected temperature.
    pub temperature: f64,
    /// Mean NLL of the fitting batch at `temperature`.
    pub nll_at_t: f64,
    /// The `(lo, hi)` interval the search ran over.
    pub search_bounds: (f64, f64),
    /// True iff the optimum is strictly inside the interval. False means the
    /// objective kept improving toward a boundary and the value is clamped.
    pub converged: bool,
    /// Present when the fit hit a boundary or another condition worth
    /// surfacing; never affects the fitted value.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

/// A calibrated prediction for one sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    /// Argmax class; ties break to the lowest index.
    pub predicted_class: usize,
    /// Probability of the predicted class, `max_k softmax(z/t)_k`.
    pub confidence: f64,
    /// Full calibrated distribution; entries positive, summing to 1.
    pub calibrated_probs: Vec<f64>,
}

/// Options for [`fit_temperature`].
#[derive(Debug, Clone, Copy)]
pub struct TemperatureFitOptions {
    pub bounds: (f64, f64),
    /// Width of the final bracket in `log t` space.
    pub tol: f64,
}

impl Default for TemperatureFitOptions {
    fn default() -> Self {
        TemperatureFitOptions {
            bounds: DEFAULT_BOUNDS,
            tol: DEFAULT_TOL,
        }
    }
}

fn check_logits(logits: &[f64]) -> Result<(), CalibrationError> {
    if logits.len() < 2 {
        return Err(CalibrationError::TooFewClasses(logits.len()));
    }
    if logits.iter().any(|z| !z.is_finite()) {
        return Err(CalibrationError::NonFiniteLogit);
    }
    Ok(())
}

fn check_temperature(t: f64) -> Result<(), CalibrationError> {
    if !t.is_finite() || t <= 0.0 {
        return Err(CalibrationError::InvalidTemperature(t));
    }
    Ok(())
}

/// Numerically stable softmax. The maximum logit is subtracted before
/// exponentiation, so arbitrarily large logits never overflow. Entries are
/// floored at `f64::MIN_POSITIVE` so downstream ratios stay well-defined even
/// when an exponent underflows.
pub fn softmax(logits: &[f64]) -> Result<Vec<f64>, CalibrationError> {
    check_logits(logits)?;
    let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut exps: Vec<f64> = logits.iter().map(|z| (z - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    for e in exps.iter_mut() {
        *e = (*e / sum).max(f64::MIN_POSITIVE);
    }
    Ok(exps)
}

/// Log-softmax via the log-sum-exp trick; exact where `softmax` would
/// underflow. Used for all likelihood computations.
pub fn log_softmax(logits: &[f64]) -> Result<Vec<f64>, CalibrationError> {
    check_logits(logits)?;
    let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lse = logits.iter().map(|z| (z - max).exp()).sum::<f64>().ln() + max;
    Ok(logits.iter().map(|z| z - lse).collect())
}

/// Divides every logit by `t`. Errors on non-positive or non-finite `t`.
pub fn scale_logits(logits: &[f64], t: f64) -> Result<Vec<f64>, CalibrationError> {
    check_logits(logits)?;
    check_temperature(t)?;
    Ok(logits.iter().map(|z| z / t).collect())
}

fn check_batch(logits: &[&[f64]], labels: &[usize]) -> Result<(), CalibrationError> {
    if logits.is_empty() {
        return Err(CalibrationError::EmptyBatch);
    }
    if logits.len() != labels.len() {
        return Err(CalibrationError::LengthMismatch {
            logits: logits.len(),
            labels: labels.len(),
        });
    }
    let k = logits[0].len();
    for (row, (z, &y)) in logits.iter().zip(labels).enumerate() {
        if z.len() != k {
            return Err(CalibrationError::RaggedBatch {
                row,
                got: z.len(),
                expected: k,
            });
        }
        check_logits(z)?;
        if y >= k {
            return Err(CalibrationError::LabelOutOfRange {
                row,
                label: y,
                num_classes: k,
            });
        }
    }
    Ok(())
}

fn nll_one(logits: &[f64], label: usize, t: f64) -> f64 {
    // -log softmax(z/t)[label], in log space throughout.
    let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max) / t;
    let lse = logits
        .iter()
        .map(|z| (z / t - max).exp())
        .sum::<f64>()
        .ln()
        + max;
    lse - logits[label] / t
}

/// Mean negative log-likelihood of `labels` under `softmax(z/t)`.
pub fn mean_nll(logits: &[&[f64]], labels: &[usize], t: f64) -> Result<f64, CalibrationError> {
    mean_nll_weighted(logits, labels, None, t)
}

/// Weighted mean NLL. Weights are normalized internally; `None` means equal
/// weights. Used by set-level fitting in its per-domain reweighting mode.
pub fn mean_nll_weighted(
    logits: &[&[f64]],
    labels: &[usize],
    weights: Option<&[f64]>,
    t: f64,
) -> Result<f64, CalibrationError> {
    check_batch(logits, labels)?;
    check_temperature(t)?;
    match weights {
        None => {
            let sum: f64 = logits
                .iter()
                .zip(labels)
                .map(|(z, &y)| nll_one(z, y, t))
                .sum();
            Ok(sum / logits.len() as f64)
        }
        Some(w) => {
            if w.len() != logits.len() {
                return Err(CalibrationError::WeightLengthMismatch {
                    weights: w.len(),
                    rows: logits.len(),
                });
            }
            if w.iter().any(|x| !x.is_finite() || *x < 0.0) {
                return Err(CalibrationError::InvalidWeights);
            }
            let total: f64 = w.iter().sum();
            if total <= 0.0 {
                return Err(CalibrationError::InvalidWeights);
            }
            let sum: f64 = logits
                .iter()
                .zip(labels)
                .zip(w)
                .map(|((z, &y), &wi)| wi * nll_one(z, y, t))
                .sum();
            Ok(sum / total)
        }
    }
}

/// Fits a temperature by golden-section search on `u = log t`, then returns
/// the best of the interior optimum, the two bounds, and `t = 1` when it lies
/// inside the bounds. `converged` is false when a bound wins, and a warning
/// describing the clamp is attached.
pub fn fit_temperature(
    logits: &[&[f64]],
    labels: &[usize],
    opts: &TemperatureFitOptions,
) -> Result<TemperatureModel, CalibrationError> {
    fit_temperature_weighted(logits, labels, None, opts)
}

/// [`fit_temperature`] with optional per-row weights (see
/// [`mean_nll_weighted`]).
pub fn fit_temperature_weighted(
    logits: &[&[f64]],
    labels: &[usize],
    weights: Option<&[f64]>,
    opts: &TemperatureFitOptions,
) -> Result<TemperatureModel, CalibrationError> {
    let (lo, hi) = opts.bounds;
    if !lo.is_finite() || !hi.is_finite() || lo <= 0.0 || lo >= hi {
        return Err(CalibrationError::InvalidBounds(lo, hi));
    }
    if !opts.tol.is_finite() || opts.tol <= 0.0 {
        return Err(CalibrationError::InvalidTolerance(opts.tol));
    }
    // Validate once up front; the objective below can then skip checks.
    mean_nll_weighted(logits, labels, weights, 1.0_f64.clamp(lo, hi))?;

    let obj = |u: f64| -> f64 {
        let t = u.exp();
        match weights {
            None => {
                let sum: f64 = logits
                    .iter()
                    .zip(labels)
                    .map(|(z, &y)| nll_one(z, y, t))
                    .sum();
                sum / logits.len() as f64
            }
            Some(w) => {
                let total: f64 = w.iter().sum();
                let sum: f64 = logits
                    .iter()
                    .zip(labels)
                    .zip(w)
                    .map(|((z, &y), &wi)| wi * nll_one(z, y, t))
                    .sum();
                sum / total
            }
        }
    };

    // Golden-section search on [log lo, log hi].
    const INVPHI: f64 = 0.618_033_988_749_894_9;
    let (mut a, mut b) = (lo.ln(), hi.ln());
    let mut c = b - INVPHI * (b - a);
    let mut d = a + INVPHI * (b - a);
    let mut fc = obj(c);
    let mut fd = obj(d);
    while b - a > opts.tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INVPHI * (b - a);
            fc = obj(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INVPHI * (b - a);
            fd = obj(d);
        }
    }
    let interior_t = (0.5 * (a + b)).exp();

    // Candidates in preference order on ties: interior result, t = 1, bounds.
    let mut candidates = vec![(interior_t, obj(interior_t.ln()))];
    if lo < 1.0 && 1.0 < hi {
        candidates.push((1.0, obj(0.0)));
    }
    candidates.push((lo, obj(lo.ln())));
    candidates.push((hi, obj(hi.ln())));

    let (mut best_t, mut best_f) = candidates[0];
    for &(t, f) in &candidates[1..] {
        if f < best_f {
            best_t = t;
            best_f = f;
        }
    }

    let at_boundary = best_t == lo || best_t == hi;
    Ok(TemperatureModel {
        temperature: best_t,
        nll_at_t: best_f,
        search_bounds: (lo, hi),
        converged: !at_boundary,
        warning: at_boundary.then(|| {
            format!(
                "temperature optimum lies at the search boundary t = {best_t}; \
                 widen the bounds if this is unexpected"
            )
        }),
    })
}

/// Scales, softmaxes, and takes the argmax (lowest index on ties).
pub fn predict(logits: &[f64], t: f64) -> Result<Prediction, CalibrationError> {
    let scaled = scale_logits(logits, t)?;
    let probs = softmax(&scaled)?;
    let mut best = 0;
    for (k, &p) in probs.iter().enumerate() {
        if p > probs[best] {
            best = k;
        }
    }
    Ok(Prediction {
        predicted_class: best,
        confidence: probs[best],
        calibrated_probs: probs,
    })
}
