//! Calibration metrics and the bootstrap evaluation protocol.
//!
//! Expected calibration error partitions the confidence range (0, 1] into
//! `M` equal half-open bins `((m-1)/M, m/M]` and sums, over non-empty bins,
//! the bin's sample share times the absolute gap between its accuracy and
//! its mean confidence. With one bin this collapses to
//! `|mean confidence - accuracy|`.
//!
//! `bootstrap_eval` scores a calibrator by resampling: predictions are
//! computed once per sample, then each trial draws a subsample (without
//! replacement by default) from a seed derived per trial, so reports are
//! reproducible regardless of trial count or thread timing.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::calibration::Prediction;
use crate::dataset::{DomainDataset, Sample};
use crate::rng::{derive_seed, SplitMix64};

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("no predictions to score")]
    EmptyInput,
    #[error("got {predictions} predictions but {labels} labels")]
    LengthMismatch { predictions: usize, labels: usize },
    #[error("bin count must be at least 1")]
    InvalidBins,
    #[error("confidence at index {index} is {value}, outside (0, 1]")]
    InvalidConfidence { index: usize, value: f64 },
    #[error("label {label} at index {index} is out of range for {num_classes} classes")]
    LabelOutOfRange {
        index: usize,
        label: usize,
        num_classes: usize,
    },
    #[error("trial size {trial_size} exceeds the {available} available samples (sampling is without replacement)")]
    TrialSizeTooLarge { trial_size: usize, available: usize },
    #[error("invalid bootstrap configuration: {detail}")]
    InvalidTrialConfig { detail: String },
    #[error("improvement ratio denominator is zero (baseline and reference coincide)")]
    ZeroDenominator,
    #[error("{what} is not finite")]
    NonFinite { what: String },
    #[error("prediction failed during evaluation: {detail}")]
    Apply { detail: String },
}

/// Per-bin accounting behind an ECE value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinStats {
    /// Inclusive only at the top: the bin covers `(lower, upper]`.
    pub lower: f64,
    pub upper: f64,
    pub count: usize,
    /// 0.0 when the bin is empty.
    pub accuracy: f64,
    /// 0.0 when the bin is empty.
    pub mean_confidence: f64,
}

/// Smallest `m` in `1..=bins` with `c <= m/bins`, i.e. the half-open
/// interval `((m-1)/bins, m/bins]` containing `c`. `ceil` gets within one
/// bin; the loops settle boundary cases exactly as the interval comparisons
/// would.
fn bin_index(c: f64, bins: usize) -> usize {
    let bins_f = bins as f64;
    let mut m = (c * bins_f).ceil() as usize;
    m = m.clamp(1, bins);
    while m > 1 && c <= (m as f64 - 1.0) / bins_f {
        m -= 1;
    }
    while m < bins && c > m as f64 / bins_f {
        m += 1;
    }
    m
}

fn validate_scoring_input(
    preds: &[&Prediction],
    labels: &[usize],
) -> Result<(), MetricsError> {
    if preds.is_empty() {
        return Err(MetricsError::EmptyInput);
    }
    if preds.len() != labels.len() {
        return Err(MetricsError::LengthMismatch {
            predictions: preds.len(),
            labels: labels.len(),
        });
    }
    for (i, (p, &label)) in preds.iter().zip(labels).enumerate() {
        if !p.confidence.is_finite() || p.confidence <= 0.0 || p.confidence > 1.0 {
            return Err(MetricsError::InvalidConfidence {
                index: i,
                value: p.confidence,
            });
        }
        if label >= p.calibrated_probs.len() {
            return Err(MetricsError::LabelOutOfRange {
                index: i,
                label,
                num_classes: p.calibrated_probs.len(),
            });
        }
    }
    Ok(())
}

fn ece_refs(
    preds: &[&Prediction],
    labels: &[usize],
    bins: usize,
) -> Result<(f64, Vec<BinStats>), MetricsError> {
    if bins == 0 {
        return Err(MetricsError::InvalidBins);
    }
    validate_scoring_input(preds, labels)?;

    let mut count = vec![0usize; bins];
    let mut hits = vec![0usize; bins];
    let mut conf_sum = vec![0.0f64; bins];
    for (p, &label) in preds.iter().zip(labels) {
        let m = bin_index(p.confidence, bins) - 1;
        count[m] += 1;
        hits[m] += usize::from(p.predicted_class == label);
        conf_sum[m] += p.confidence;
    }

    let n = preds.len() as f64;
    let bins_f = bins as f64;
    let mut ece = 0.0;
    let mut stats = Vec::with_capacity(bins);
    for m in 0..bins {
        let (acc, conf) = if count[m] > 0 {
            let c = count[m] as f64;
            (hits[m] as f64 / c, conf_sum[m] / c)
        } else {
            (0.0, 0.0)
        };
        if count[m] > 0 {
            ece += count[m] as f64 / n * (acc - conf).abs();
        }
        stats.push(BinStats {
            lower: m as f64 / bins_f,
            upper: (m as f64 + 1.0) / bins_f,
            count: count[m],
            accuracy: acc,
            mean_confidence: conf,
        });
    }
    Ok((ece, stats))
}

/// Expected calibration error plus the per-bin breakdown.
pub fn ece(
    preds: &[Prediction],
    labels: &[usize],
    bins: usize,
) -> Result<(f64, Vec<BinStats>), MetricsError> {
    let refs: Vec<&Prediction> = preds.iter().collect();
    ece_refs(&refs, labels, bins)
}

/// Fraction of samples whose predicted class matches the label.
pub fn accuracy(preds: &[Prediction], labels: &[usize]) -> Result<f64, MetricsError> {
    let refs: Vec<&Prediction> = preds.iter().collect();
    validate_scoring_input(&refs, labels)?;
    let hits = preds
        .iter()
        .zip(labels)
        .filter(|(p, &l)| p.predicted_class == l)
        .count();
    Ok(hits as f64 / preds.len() as f64)
}

/// Fraction of the source-to-oracle calibration gap a method recovers:
/// `(ece_source - ece_method) / (ece_source - ece_target)`, where
/// `ece_target` is the target-oracle reference. 1 means oracle parity, 0
/// means no improvement over the source-only baseline; values outside
/// [0, 1] are legitimate (a method can beat the oracle on a finite sample,
/// or hurt).
pub fn improvement_ratio(
    ece_source: f64,
    ece_target: f64,
    ece_method: f64,
) -> Result<f64, MetricsError> {
    for (v, name) in [
        (ece_source, "ece_source"),
        (ece_target, "ece_target"),
        (ece_method, "ece_method"),
    ] {
        if !v.is_finite() {
            return Err(MetricsError::NonFinite { what: name.into() });
        }
    }
    let denom = ece_source - ece_target;
    if denom == 0.0 {
        return Err(MetricsError::ZeroDenominator);
    }
    Ok((ece_source - ece_method) / denom)
}

/// Bootstrap evaluation settings. The defaults match the reporting protocol
/// used throughout: 1000 trials of 1500 samples, 15 bins, sampling without
/// replacement.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct BootstrapConfig {
    pub n_trials: usize,
    pub trial_size: usize,
    pub bins: usize,
    pub seed: u64,
    /// `false` (the default) draws each trial as a distinct-index subsample,
    /// which requires `trial_size <= n`.
    pub with_replacement: bool,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        BootstrapConfig {
            n_trials: 1000,
            trial_size: 1500,
            bins: 15,
            seed: 0,
            with_replacement: false,
        }
    }
}

/// Aggregate of a bootstrap evaluation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub ece_mean: f64,
    /// Population standard deviation across trials.
    pub ece_std: f64,
    pub accuracy_mean: f64,
    /// 2.5th percentile of per-trial ECE (linear interpolation between
    /// order statistics).
    pub percentile_2_5: f64,
    pub percentile_97_5: f64,
    pub n_trials: usize,
    pub trial_size: usize,
    pub bins: usize,
    /// Bin breakdown from the final trial, for reliability diagrams.
    pub per_bin: Vec<BinStats>,
}

/// Quantile by linear interpolation: index `q * (n - 1)` into the sorted
/// values, fractional part interpolated.
pub(crate) fn percentile(sorted: &[f64], q: f64) -> f64 {
    debug_assert!(!sorted.is_empty());
    let idx = q * (sorted.len() - 1) as f64;
    let lo = idx.floor() as usize;
    let hi = idx.ceil() as usize;
    if lo == hi {
        sorted[lo]
    } else {
        sorted[lo] + (idx - lo as f64) * (sorted[hi] - sorted[lo])
    }
}

/// Runs the bootstrap protocol: predict every sample once with `predict_fn`,
/// then score `n_trials` seeded subsamples. Each trial's seed is derived
/// from `config.seed` and the trial index, so the report depends only on
/// the dataset, the calibrator, and the configuration.
pub fn bootstrap_eval<F, E>(
    ds: &DomainDataset,
    config: &BootstrapConfig,
    mut predict_fn: F,
) -> Result<EvaluationReport, MetricsError>
where
    F: FnMut(&Sample) -> Result<Prediction, E>,
    E: std::fmt::Display,
{
    if config.n_trials == 0 {
        return Err(MetricsError::InvalidTrialConfig {
            detail: "n_trials must be at least 1".into(),
        });
    }
    if config.trial_size == 0 {
        return Err(MetricsError::InvalidTrialConfig {
            detail: "trial_size must be at least 1".into(),
        });
    }
    if config.bins == 0 {
        return Err(MetricsError::InvalidBins);
    }
    if ds.is_empty() {
        return Err(MetricsError::EmptyInput);
    }
    if !config.with_replacement && config.trial_size > ds.len() {
        return Err(MetricsError::TrialSizeTooLarge {
            trial_size: config.trial_size,
            available: ds.len(),
        });
    }

    let mut preds = Vec::with_capacity(ds.len());
    let mut labels = Vec::with_capacity(ds.len());
    for s in ds.samples() {
        preds.push(predict_fn(s).map_err(|e| MetricsError::Apply {
            detail: e.to_string(),
        })?);
        labels.push(s.label);
    }

    let n = ds.len();
    let mut trial_ece = Vec::with_capacity(config.n_trials);
    let mut acc_sum = 0.0;
    let mut last_bins = Vec::new();
    for trial in 0..config.n_trials {
        let mut rng = SplitMix64::new(derive_seed(config.seed, "bootstrap-trial", trial as u64));
        let indices: Vec<usize> = if config.with_replacement {
            (0..config.trial_size).map(|_| rng.gen_range(n)).collect()
        } else {
            rng.sample_distinct(n, config.trial_size)
        };
        let trial_preds: Vec<&Prediction> = indices.iter().map(|&i| &preds[i]).collect();
        let trial_labels: Vec<usize> = indices.iter().map(|&i| labels[i]).collect();
        let (e, bins) = ece_refs(&trial_preds, &trial_labels, config.bins)?;
        let hits = trial_preds
            .iter()
            .zip(&trial_labels)
            .filter(|(p, &l)| p.predicted_class == l)
            .count();
        acc_sum += hits as f64 / config.trial_size as f64;
        trial_ece.push(e);
        last_bins = bins;
    }

    let n_trials = config.n_trials as f64;
    let ece_mean = trial_ece.iter().sum::<f64>() / n_trials;
    let ece_var = trial_ece
        .iter()
        .map(|e| (e - ece_mean) * (e - ece_mean))
        .sum::<f64>()
        / n_trials;
    let mut sorted = trial_ece;
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("ECE values are finite"));
    Ok(EvaluationReport {
        ece_mean,
        ece_std: ece_var.sqrt(),
        accuracy_mean: acc_sum / n_trials,
        percentile_2_5: percentile(&sorted, 0.025),
        percentile_97_5: percentile(&sorted, 0.975),
        n_trials: config.n_trials,
        trial_size: config.trial_size,
        bins: config.bins,
        per_bin: last_bins,
    })
}

/// One row of an evaluation table: a method's bootstrap summary on a target
/// domain, plus its improvement ratio when baseline and oracle rows exist.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRecord {
    pub method: String,
    pub target_domain: String,
    pub ece_mean: f64,
    pub ece_std: f64,
    #[serde(rename = "p2.5")]
    pub percentile_2_5: f64,
    #[serde(rename = "p97.5")]
    pub percentile_97_5: f64,
    pub accuracy: f64,
    /// Empty in CSV when no oracle/baseline pair was available.
    pub ir: Option<f64>,
}

impl ReportRecord {
    pub fn from_report(
        method: impl Into<String>,
        target_domain: impl Into<String>,
        report: &EvaluationReport,
        ir: Option<f64>,
    ) -> Self {
        ReportRecord {
            method: method.into(),
            target_domain: target_domain.into(),
            ece_mean: report.ece_mean,
            ece_std: report.ece_std,
            percentile_2_5: report.percentile_2_5,
            percentile_97_5: report.percentile_97_5,
            accuracy: report.accuracy_mean,
            ir,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pred(probs: &[f64], class: usize) -> Prediction {
        Prediction {
            predicted_class: class,
            confidence: probs[class],
            calibrated_probs: probs.to_vec(),
        }
    }

    #[test]
    fn two_bin_worked_example() {
        // Bin (0, 0.5]: confidences 0.4 and 0.45, one correct -> gap 0.075.
        // Bin (0.5, 1]: confidences 0.9 and 0.8, one correct -> gap 0.35.
        // Each bin holds half the mass: ECE = 0.5*0.075 + 0.5*0.35 = 0.2125.
        let preds = vec![
            pred(&[0.4, 0.35, 0.25], 0),
            pred(&[0.45, 0.3, 0.25], 0),
            pred(&[0.05, 0.9, 0.05], 1),
            pred(&[0.1, 0.1, 0.8], 2),
        ];
        let labels = vec![0, 1, 1, 0];
        let (e, bins) = ece(&preds, &labels, 2).unwrap();
        assert!((e - 0.2125).abs() < 1e-12, "{e}");
        assert_eq!(bins.len(), 2);
        assert_eq!((bins[0].count, bins[1].count), (2, 2));
        assert!((bins[0].accuracy - 0.5).abs() < 1e-12);
        assert!((bins[0].mean_confidence - 0.425).abs() < 1e-12);
        assert!((bins[1].mean_confidence - 0.85).abs() < 1e-12);
        assert_eq!((bins[0].lower, bins[0].upper), (0.0, 0.5));
        assert_eq!((bins[1].lower, bins[1].upper), (0.5, 1.0));
    }

    #[test]
    fn single_bin_is_mean_gap() {
        let preds = vec![
            pred(&[0.8, 0.2], 0),
            pred(&[0.8, 0.2], 0),
            pred(&[0.7, 0.3], 0),
        ];
        let labels = vec![0, 1, 0];
        let (e, _) = ece(&preds, &labels, 1).unwrap();
        let mean_conf: f64 = (0.8 + 0.8 + 0.7) / 3.0;
        let acc: f64 = 2.0 / 3.0;
        assert_eq!(e, (mean_conf - acc).abs());
    }

    #[test]
    fn bin_boundaries_are_half_open() {
        assert_eq!(bin_index(0.5, 2), 1);
        assert_eq!(bin_index(0.5 + 1e-12, 2), 2);
        assert_eq!(bin_index(1.0, 2), 2);
        assert_eq!(bin_index(1e-300, 2), 1);
        assert_eq!(bin_index(1.0, 15), 15);
        // Exact multiples land in the lower bin even when the product
        // rounds up: 0.2 * 5 evaluates to just above 1 in floats.
        assert_eq!(bin_index(0.2, 5), 1);
        for i in 1..100 {
            let c = i as f64 / 100.0;
            let m = bin_index(c, 15);
            assert!(c > (m as f64 - 1.0) / 15.0 && c <= m as f64 / 15.0, "c={c} m={m}");
        }
    }

    #[test]
    fn empty_bins_report_zeros() {
        let preds = vec![pred(&[0.9, 0.1], 0)];
        let (_, bins) = ece(&preds, &[0], 4).unwrap();
        assert_eq!(bins[0].count, 0);
        assert_eq!(bins[0].accuracy, 0.0);
        assert_eq!(bins[0].mean_confidence, 0.0);
        assert_eq!(bins[3].count, 1);
    }

    #[test]
    fn scoring_input_validation() {
        let p = vec![pred(&[0.9, 0.1], 0)];
        assert!(matches!(ece(&[], &[], 2), Err(MetricsError::EmptyInput)));
        assert!(matches!(
            ece(&p, &[0, 1], 2),
            Err(MetricsError::LengthMismatch { .. })
        ));
        assert!(matches!(ece(&p, &[0], 0), Err(MetricsError::InvalidBins)));
        assert!(matches!(
            ece(&p, &[5], 2),
            Err(MetricsError::LabelOutOfRange { label: 5, .. })
        ));
        let bad = vec![Prediction {
            predicted_class: 0,
            confidence: 1.5,
            calibrated_probs: vec![1.5, 0.0],
        }];
        assert!(matches!(
            ece(&bad, &[0], 2),
            Err(MetricsError::InvalidConfidence { .. })
        ));
        let zero = vec![Prediction {
            predicted_class: 0,
            confidence: 0.0,
            calibrated_probs: vec![0.0, 1.0],
        }];
        assert!(matches!(
            ece(&zero, &[0], 2),
            Err(MetricsError::InvalidConfidence { .. })
        ));
    }

    #[test]
    fn accuracy_counts_matches() {
        let preds = vec![
            pred(&[0.9, 0.1], 0),
            pred(&[0.9, 0.1], 0),
            pred(&[0.2, 0.8], 1),
            pred(&[0.6, 0.4], 0),
        ];
        assert_eq!(accuracy(&preds, &[0, 1, 1, 0]).unwrap(), 0.75);
    }

    #[test]
    fn improvement_ratio_reference_values() {
        // ECE percentages 10.45 (source), 3.94 (oracle): a method at 6.80
        // recovers 0.56 of the gap, one at 6.98 recovers 0.53.
        let ir1 = improvement_ratio(10.45, 3.94, 6.80).unwrap();
        assert!(((ir1 * 100.0).round() / 100.0 - 0.56).abs() < 1e-12, "{ir1}");
        let ir2 = improvement_ratio(10.45, 3.94, 6.98).unwrap();
        assert!(((ir2 * 100.0).round() / 100.0 - 0.53).abs() < 1e-12, "{ir2}");
        // Scale invariance: the same numbers as fractions give the same
        // ratio.
        let ir3 = improvement_ratio(0.1045, 0.0394, 0.0680).unwrap();
        assert!((ir1 - ir3).abs() < 1e-12);
    }

    #[test]
    fn improvement_ratio_rejects_degenerate_input() {
        assert!(matches!(
            improvement_ratio(0.1, 0.1, 0.05),
            Err(MetricsError::ZeroDenominator)
        ));
        assert!(matches!(
            improvement_ratio(f64::NAN, 0.05, 0.02),
            Err(MetricsError::NonFinite { .. })
        ));
    }

    #[test]
    fn percentile_interpolates() {
        let v = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(percentile(&v, 0.0), 1.0);
        assert_eq!(percentile(&v, 1.0), 4.0);
        assert_eq!(percentile(&v, 0.5), 2.5);
        assert!((percentile(&v, 0.025) - 1.075).abs() < 1e-12);
        assert_eq!(percentile(&[7.0], 0.975), 7.0);
    }

    fn toy_dataset(n: usize) -> DomainDataset {
        let samples: Vec<Sample> = (0..n)
            .map(|i| Sample {
                domain: "d".into(),
                label: usize::from(i % 3 == 0),
                feature: vec![i as f64],
                logits: vec![1.0 + (i % 7) as f64 * 0.2, 0.0],
            })
            .collect();
        DomainDataset::new(samples).unwrap()
    }

    fn identity_predict(s: &Sample) -> Result<Prediction, MetricsError> {
        crate::calibration::predict(&s.logits, 1.0).map_err(|e| MetricsError::Apply {
            detail: e.to_string(),
        })
    }

    #[test]
    fn bootstrap_is_deterministic_in_the_seed() {
        let ds = toy_dataset(60);
        let cfg = BootstrapConfig {
            n_trials: 50,
            trial_size: 40,
            bins: 5,
            seed: 11,
            with_replacement: false,
        };
        let a = bootstrap_eval(&ds, &cfg, identity_predict).unwrap();
        let b = bootstrap_eval(&ds, &cfg, identity_predict).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
        let c = bootstrap_eval(
            &ds,
            &BootstrapConfig { seed: 12, ..cfg },
            identity_predict,
        )
        .unwrap();
        assert_ne!(a.ece_mean, c.ece_mean);
        assert!(a.percentile_2_5 <= a.percentile_97_5);
        assert_eq!(a.n_trials, 50);
        assert_eq!(a.per_bin.len(), 5);
    }

    #[test]
    fn full_size_trials_without_replacement_have_zero_variance() {
        // Sampling n distinct indices from n samples yields the whole set
        // every trial; scores agree up to summation order, so the spread
        // across trials is pure float noise.
        let ds = toy_dataset(30);
        let cfg = BootstrapConfig {
            n_trials: 10,
            trial_size: 30,
            bins: 4,
            seed: 3,
            with_replacement: false,
        };
        let report = bootstrap_eval(&ds, &cfg, identity_predict).unwrap();
        assert!(report.ece_std < 1e-15, "{}", report.ece_std);
        let preds: Vec<Prediction> = ds
            .samples()
            .iter()
            .map(|s| identity_predict(s).unwrap())
            .collect();
        let labels: Vec<usize> = ds.samples().iter().map(|s| s.label).collect();
        let (full, _) = ece(&preds, &labels, 4).unwrap();
        assert!((report.ece_mean - full).abs() < 1e-15);
    }

    #[test]
    fn bootstrap_config_validation() {
        let ds = toy_dataset(10);
        let bad = |cfg: BootstrapConfig| bootstrap_eval(&ds, &cfg, identity_predict);
        assert!(matches!(
            bad(BootstrapConfig {
                trial_size: 11,
                n_trials: 2,
                ..BootstrapConfig::default()
            }),
            Err(MetricsError::TrialSizeTooLarge { .. })
        ));
        // With replacement, oversized trials are fine.
        assert!(bad(BootstrapConfig {
            trial_size: 25,
            n_trials: 2,
            bins: 3,
            seed: 0,
            with_replacement: true,
        })
        .is_ok());
        assert!(matches!(
            bad(BootstrapConfig {
                n_trials: 0,
                ..BootstrapConfig::default()
            }),
            Err(MetricsError::InvalidTrialConfig { .. })
        ));
        assert!(matches!(
            bad(BootstrapConfig {
                n_trials: 1,
                trial_size: 0,
                ..BootstrapConfig::default()
            }),
            Err(MetricsError::InvalidTrialConfig { .. })
        ));
        assert!(matches!(
            bad(BootstrapConfig {
                n_trials: 1,
                trial_size: 5,
                bins: 0,
                ..BootstrapConfig::default()
            }),
            Err(MetricsError::InvalidBins)
        ));
    }

    #[test]
    fn prediction_failures_surface_as_apply_errors() {
        let ds = toy_dataset(5);
        let result = bootstrap_eval(
            &ds,
            &BootstrapConfig {
                n_trials: 1,
                trial_size: 2,
                bins: 2,
                seed: 0,
                with_replacement: false,
            },
            |_s| Err("deliberate failure"),
        );
        match result {
            Err(MetricsError::Apply { detail }) => assert!(detail.contains("deliberate")),
            other => panic!("expected Apply error, got {other:?}"),
        }
    }

    #[test]
    fn report_record_copies_summary_fields() {
        let report = EvaluationReport {
            ece_mean: 0.05,
            ece_std: 0.01,
            accuracy_mean: 0.9,
            percentile_2_5: 0.03,
            percentile_97_5: 0.07,
            n_trials: 100,
            trial_size: 50,
            bins: 15,
            per_bin: vec![],
        };
        let rec = ReportRecord::from_report("set_level", "t0", &report, Some(0.5));
        assert_eq!(rec.method, "set_level");
        assert_eq!(rec.ece_mean, 0.05);
        assert_eq!(rec.ir, Some(0.5));
        // The CSV headers spell the percentile columns with dots.
        let json = serde_json::to_string(&rec).unwrap();
        assert!(json.contains("\"p2.5\""));
        assert!(json.contains("\"p97.5\""));
    }
}
