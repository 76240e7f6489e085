//! Calibrators that transfer temperatures from calibration domains to an
//! unlabeled target domain.
//!
//! Four strategies share one interface:
//!
//! * set-level: one temperature fit on all pooled calibration samples;
//! * cluster-NN: k-means on calibration features, one temperature per
//!   cluster, applied by nearest-centroid lookup;
//! * cluster regression: ridge least squares from cluster mean features to
//!   cluster temperatures, so unseen feature regions get an extrapolated
//!   temperature (clamped to the search bounds);
//! * ensemble: averages the temperature-scaled logit vectors of several
//!   calibrators, then softmaxes the average.
//!
//! `source_only` and `target_oracle` are the same fit as set-level run on
//! different data (the source domain's holdout, or the target's own labeled
//! holdout); they exist as distinct kinds so reports can name the protocol
//! role a model played. Every calibrator applies per-sample, is pure, and
//! serializes to a versioned JSON document.

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::calibration::{
    self, fit_temperature_weighted, predict, CalibrationError, Prediction, TemperatureFitOptions,
    TemperatureModel,
};
use crate::clustering::{
    assign_nearest, kmeans_fit, ClusterError, ClusterFitOptions, ClusterModel,
};
use crate::dataset::{DomainDataset, Sample};
use crate::linalg;

/// Version stamp written into model files.
pub const MODEL_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum CalibratorError {
    #[error(transparent)]
    Calibration(#[from] CalibrationError),
    #[error(transparent)]
    Cluster(#[from] ClusterError),
    #[error("cluster regression requires k >= 2, got {k}")]
    TooFewClusters { k: usize },
    #[error(
        "cluster regression requires at least 2 clusters with >= {min_cluster_size} samples; \
         only {reliable} qualify"
    )]
    TooFewReliableClusters {
        reliable: usize,
        min_cluster_size: usize,
    },
    #[error("ridge penalty must be finite and non-negative, got {0}")]
    InvalidRidge(f64),
    #[error("invalid regression input: {detail}")]
    RegressionInput { detail: String },
    #[error("ensemble needs at least one member")]
    EnsembleEmpty,
    #[error("ensembles cannot contain ensembles")]
    EnsembleNested,
    #[error("an ensemble does not resolve to a single temperature")]
    NoScalarTemperature,
    #[error("model serialization failed: {0}")]
    Serialization(String),
    #[error("unsupported model schema version {0}")]
    UnsupportedSchema(u32),
}

/// How pooled fits weight samples across calibration domains.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DomainWeighting {
    /// Every sample counts equally; large domains dominate.
    PerSample,
    /// Every domain counts equally regardless of its sample count.
    PerDomain,
}

/// Shared knobs for all calibrator fits. Unused fields are ignored by
/// strategies that do not need them (a set-level fit reads neither `k` nor
/// `ridge_lambda`).
#[derive(Debug, Clone, Copy)]
pub struct FitOptions {
    /// Temperature search interval, also the clamp range for regression
    /// predictions.
    pub bounds: (f64, f64),
    /// Golden-section tolerance in log-temperature space.
    pub tol: f64,
    pub weighting: DomainWeighting,
    /// Cluster count for the cluster strategies.
    pub k: usize,
    pub seed: u64,
    /// Clusters with fewer members fall back to the pooled temperature.
    pub min_cluster_size: usize,
    /// Ridge penalty for cluster regression; `None` means `1e-3 * d` for
    /// feature dimension `d`.
    pub ridge_lambda: Option<f64>,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            bounds: calibration::DEFAULT_BOUNDS,
            tol: calibration::DEFAULT_TOL,
            weighting: DomainWeighting::PerSample,
            k: 8,
            seed: 0,
            min_cluster_size: 10,
            ridge_lambda: None,
        }
    }
}

/// Linear map from a feature vector to a temperature.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RegressionModel {
    pub weights: Vec<f64>,
    pub intercept: f64,
    pub ridge_lambda: f64,
    /// Mean squared residual over the cluster (mean feature, temperature)
    /// pairs the model was fit on.
    pub training_mse: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

impl RegressionModel {
    /// `w . x + b`, unclamped. Callers clamp to the temperature bounds.
    pub fn predict_temperature(&self, feature: &[f64]) -> f64 {
        self.weights.iter().zip(feature).map(|(w, x)| w * x).sum::<f64>() + self.intercept
    }
}

/// A fitted calibrator. The variant determines exactly which parameters
/// exist, so a model can never carry fields its strategy does not use.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Calibrator {
    /// Identity: temperature 1 everywhere.
    Uncalibrated,
    /// Set-level fit on the source domain's labeled holdout.
    SourceOnly { temp: TemperatureModel },
    /// Set-level fit on the target domain's own labeled holdout; the upper
    /// reference in evaluations.
    TargetOracle { temp: TemperatureModel },
    SetLevel { temp: TemperatureModel },
    ClusterNn {
        clusters: ClusterModel,
        /// `temps[j]` belongs to cluster `j`; fallback clusters hold a copy
        /// of the pooled temperature.
        temps: Vec<TemperatureModel>,
        min_cluster_size: usize,
        /// Clusters that were under `min_cluster_size` and inherited the
        /// pooled temperature.
        fallback_clusters: Vec<usize>,
    },
    ClusterRegression {
        clusters: ClusterModel,
        temps: Vec<TemperatureModel>,
        regression: RegressionModel,
        /// Predictions are clamped into this interval.
        clamp_bounds: (f64, f64),
        /// Runtime clamp counter; shared between clones, not serialized.
        #[serde(skip, default)]
        clamp_events: Arc<AtomicU64>,
    },
    Ensemble { members: Vec<Calibrator> },
}

fn batch_views(ds: &DomainDataset) -> (Vec<&[f64]>, Vec<usize>) {
    let logits: Vec<&[f64]> = ds.samples().iter().map(|s| s.logits.as_slice()).collect();
    let labels: Vec<usize> = ds.samples().iter().map(|s| s.label).collect();
    (logits, labels)
}

/// Pooled temperature fit over a whole dataset, honoring the weighting mode.
fn pooled_temperature(
    ds: &DomainDataset,
    opts: &FitOptions,
) -> Result<TemperatureModel, CalibratorError> {
    let (logits, labels) = batch_views(ds);
    let fit_opts = TemperatureFitOptions {
        bounds: opts.bounds,
        tol: opts.tol,
    };
    let weights: Option<Vec<f64>> = match opts.weighting {
        DomainWeighting::PerSample => None,
        DomainWeighting::PerDomain => {
            let mut w = vec![0.0; ds.len()];
            for (_, indices) in ds.domain_indices() {
                let share = 1.0 / indices.len() as f64;
                for i in indices {
                    w[i] = share;
                }
            }
            Some(w)
        }
    };
    Ok(fit_temperature_weighted(
        &logits,
        &labels,
        weights.as_deref(),
        &fit_opts,
    )?)
}

/// One temperature for the pooled calibration set.
pub fn fit_set_level(cal: &DomainDataset, opts: &FitOptions) -> Result<Calibrator, CalibratorError> {
    Ok(Calibrator::SetLevel {
        temp: pooled_temperature(cal, opts)?,
    })
}

/// Set-level fit on source-domain holdout data, kept as its own kind for
/// reporting.
pub fn fit_source_only(
    source_small: &DomainDataset,
    opts: &FitOptions,
) -> Result<Calibrator, CalibratorError> {
    Ok(Calibrator::SourceOnly {
        temp: pooled_temperature(source_small, opts)?,
    })
}

/// Set-level fit on the target's own labeled holdout.
pub fn fit_target_oracle(
    target_small: &DomainDataset,
    opts: &FitOptions,
) -> Result<Calibrator, CalibratorError> {
    Ok(Calibrator::TargetOracle {
        temp: pooled_temperature(target_small, opts)?,
    })
}

struct ClusteredTemps {
    clusters: ClusterModel,
    temps: Vec<TemperatureModel>,
    fallback_clusters: Vec<usize>,
}

fn cluster_temperatures(
    cal: &DomainDataset,
    opts: &FitOptions,
) -> Result<ClusteredTemps, CalibratorError> {
    let features: Vec<Vec<f64>> = cal.samples().iter().map(|s| s.feature.clone()).collect();
    let clusters = kmeans_fit(
        &features,
        &ClusterFitOptions {
            k: opts.k,
            seed: opts.seed,
            ..ClusterFitOptions::default()
        },
    )?;
    let pooled = pooled_temperature(cal, opts)?;
    let fit_opts = TemperatureFitOptions {
        bounds: opts.bounds,
        tol: opts.tol,
    };

    let mut temps = Vec::with_capacity(opts.k);
    let mut fallback_clusters = Vec::new();
    for j in 0..opts.k {
        let members: Vec<usize> = clusters
            .assignments
            .iter()
            .enumerate()
            .filter(|(_, &a)| a == j)
            .map(|(i, _)| i)
            .collect();
        if members.len() < opts.min_cluster_size {
            let mut t = pooled.clone();
            t.warning = Some(format!(
                "cluster {j} has {} samples (below {}); using the pooled temperature",
                members.len(),
                opts.min_cluster_size
            ));
            temps.push(t);
            fallback_clusters.push(j);
            continue;
        }
        let logits: Vec<&[f64]> = members
            .iter()
            .map(|&i| cal.samples()[i].logits.as_slice())
            .collect();
        let labels: Vec<usize> = members.iter().map(|&i| cal.samples()[i].label).collect();
        temps.push(fit_temperature_weighted(&logits, &labels, None, &fit_opts)?);
    }
    Ok(ClusteredTemps {
        clusters,
        temps,
        fallback_clusters,
    })
}

/// K-means on calibration features, one temperature per cluster, applied by
/// nearest centroid.
pub fn fit_cluster_nn(cal: &DomainDataset, opts: &FitOptions) -> Result<Calibrator, CalibratorError> {
    let ct = cluster_temperatures(cal, opts)?;
    Ok(Calibrator::ClusterNn {
        clusters: ct.clusters,
        temps: ct.temps,
        min_cluster_size: opts.min_cluster_size,
        fallback_clusters: ct.fallback_clusters,
    })
}

/// Ridge least squares with an unpenalized intercept, solved in closed form
/// from the normal equations. Singular systems (possible when
/// `ridge_lambda = 0`) fall back to the minimum-norm solution and attach a
/// warning.
#[allow(clippy::needless_range_loop)] // Gram-matrix assembly in index form
pub fn fit_ridge(
    features: &[Vec<f64>],
    targets: &[f64],
    ridge_lambda: f64,
) -> Result<RegressionModel, CalibratorError> {
    if !ridge_lambda.is_finite() || ridge_lambda < 0.0 {
        return Err(CalibratorError::InvalidRidge(ridge_lambda));
    }
    if features.is_empty() || features.len() != targets.len() {
        return Err(CalibratorError::RegressionInput {
            detail: format!(
                "{} feature rows against {} targets",
                features.len(),
                targets.len()
            ),
        });
    }
    let d = features[0].len();
    if d == 0 {
        return Err(CalibratorError::RegressionInput {
            detail: "feature dimension must be at least 1".into(),
        });
    }
    for (i, f) in features.iter().enumerate() {
        if f.len() != d {
            return Err(CalibratorError::RegressionInput {
                detail: format!("row {i} has {} entries, expected {d}", f.len()),
            });
        }
        if f.iter().any(|v| !v.is_finite()) {
            return Err(CalibratorError::RegressionInput {
                detail: format!("row {i} contains a non-finite value"),
            });
        }
    }
    if targets.iter().any(|v| !v.is_finite()) {
        return Err(CalibratorError::RegressionInput {
            detail: "targets contain a non-finite value".into(),
        });
    }

    // Normal equations for [X | 1] beta = y with the intercept left out of
    // the penalty.
    let w = d + 1;
    let mut gram = vec![vec![0.0; w]; w];
    let mut rhs = vec![0.0; w];
    let augmented = |row: &Vec<f64>, j: usize| if j < d { row[j] } else { 1.0 };
    for (row, &y) in features.iter().zip(targets) {
        for i in 0..w {
            let xi = augmented(row, i);
            rhs[i] += xi * y;
            for j in 0..w {
                gram[i][j] += xi * augmented(row, j);
            }
        }
    }
    for i in 0..d {
        gram[i][i] += ridge_lambda;
    }

    let (beta, warning) = match linalg::solve_lu(&gram, &rhs, 1e-12) {
        Some(b) => (b, None),
        None => (
            linalg::pinv_solve_symmetric(&gram, &rhs, 1e-12),
            Some(
                "normal equations are singular; using the minimum-norm solution"
                    .to_string(),
            ),
        ),
    };
    let (weights, intercept) = (beta[..d].to_vec(), beta[d]);
    let model = RegressionModel {
        weights,
        intercept,
        ridge_lambda,
        training_mse: 0.0,
        warning,
    };
    let mse = features
        .iter()
        .zip(targets)
        .map(|(f, &y)| {
            let r = model.predict_temperature(f) - y;
            r * r
        })
        .sum::<f64>()
        / features.len() as f64;
    Ok(RegressionModel {
        training_mse: mse,
        ..model
    })
}

/// Clusters, fits per-cluster temperatures, then regresses temperature on
/// cluster mean features. Fallback clusters (under `min_cluster_size`) are
/// excluded from the regression; at least two reliable clusters must remain.
pub fn fit_cluster_regression(
    cal: &DomainDataset,
    opts: &FitOptions,
) -> Result<Calibrator, CalibratorError> {
    if opts.k < 2 {
        return Err(CalibratorError::TooFewClusters { k: opts.k });
    }
    let ct = cluster_temperatures(cal, opts)?;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for j in 0..opts.k {
        if ct.fallback_clusters.contains(&j) {
            continue;
        }
        xs.push(ct.clusters.mean_features[j].clone());
        ys.push(ct.temps[j].temperature);
    }
    if xs.len() < 2 {
        return Err(CalibratorError::TooFewReliableClusters {
            reliable: xs.len(),
            min_cluster_size: opts.min_cluster_size,
        });
    }
    let lambda = opts
        .ridge_lambda
        .unwrap_or(1e-3 * cal.feature_dim() as f64);
    let regression = fit_ridge(&xs, &ys, lambda)?;
    Ok(Calibrator::ClusterRegression {
        clusters: ct.clusters,
        temps: ct.temps,
        regression,
        clamp_bounds: opts.bounds,
        clamp_events: Arc::default(),
    })
}

/// The standard ensemble: set-level, cluster-NN, and cluster regression fit
/// on the same calibration data.
pub fn fit_ensemble(cal: &DomainDataset, opts: &FitOptions) -> Result<Calibrator, CalibratorError> {
    Calibrator::ensemble(vec![
        fit_set_level(cal, opts)?,
        fit_cluster_nn(cal, opts)?,
        fit_cluster_regression(cal, opts)?,
    ])
}

impl Calibrator {
    /// Builds an ensemble. Members must themselves resolve to a scalar
    /// temperature, so nesting is rejected.
    pub fn ensemble(members: Vec<Calibrator>) -> Result<Calibrator, CalibratorError> {
        if members.is_empty() {
            return Err(CalibratorError::EnsembleEmpty);
        }
        if members.iter().any(|m| matches!(m, Calibrator::Ensemble { .. })) {
            return Err(CalibratorError::EnsembleNested);
        }
        Ok(Calibrator::Ensemble { members })
    }

    /// The serialized tag for this kind; also the `--method` spelling in the
    /// CLI.
    pub fn kind_name(&self) -> &'static str {
        match self {
            Calibrator::Uncalibrated => "uncalibrated",
            Calibrator::SourceOnly { .. } => "source_only",
            Calibrator::TargetOracle { .. } => "target_oracle",
            Calibrator::SetLevel { .. } => "set_level",
            Calibrator::ClusterNn { .. } => "cluster_nn",
            Calibrator::ClusterRegression { .. } => "cluster_regression",
            Calibrator::Ensemble { .. } => "ensemble",
        }
    }

    /// The temperature this calibrator would apply to `sample`. Ensembles
    /// have no single temperature and return an error.
    pub fn resolve_temperature(&self, sample: &Sample) -> Result<f64, CalibratorError> {
        match self {
            Calibrator::Uncalibrated => Ok(1.0),
            Calibrator::SourceOnly { temp }
            | Calibrator::TargetOracle { temp }
            | Calibrator::SetLevel { temp } => Ok(temp.temperature),
            Calibrator::ClusterNn { clusters, temps, .. } => {
                let j = assign_nearest(clusters, &sample.feature)?;
                Ok(temps[j].temperature)
            }
            Calibrator::ClusterRegression {
                regression,
                clamp_bounds,
                clamp_events,
                ..
            } => {
                let raw = regression.predict_temperature(&sample.feature);
                let clamped = raw.clamp(clamp_bounds.0, clamp_bounds.1);
                if clamped != raw {
                    clamp_events.fetch_add(1, Ordering::Relaxed);
                }
                Ok(clamped)
            }
            Calibrator::Ensemble { .. } => Err(CalibratorError::NoScalarTemperature),
        }
    }

    /// Calibrated prediction for one sample.
    pub fn apply(&self, sample: &Sample) -> Result<Prediction, CalibratorError> {
        match self {
            Calibrator::Ensemble { members } => {
                let mut avg = vec![0.0; sample.logits.len()];
                for m in members {
                    let t = m.resolve_temperature(sample)?;
                    let scaled = calibration::scale_logits(&sample.logits, t)?;
                    for (a, z) in avg.iter_mut().zip(&scaled) {
                        *a += z;
                    }
                }
                for a in avg.iter_mut() {
                    *a /= members.len() as f64;
                }
                Ok(predict(&avg, 1.0)?)
            }
            _ => {
                let t = self.resolve_temperature(sample)?;
                Ok(predict(&sample.logits, t)?)
            }
        }
    }

    /// Times a regression calibrator clamped a prediction since this value
    /// (or a clone sharing the counter) was created. Zero for other kinds.
    pub fn clamp_count(&self) -> u64 {
        match self {
            Calibrator::ClusterRegression { clamp_events, .. } => {
                clamp_events.load(Ordering::Relaxed)
            }
            _ => 0,
        }
    }

    /// Serializes to the versioned model-file JSON document.
    pub fn to_json(&self) -> Result<String, CalibratorError> {
        let file = ModelFile {
            schema_version: MODEL_SCHEMA_VERSION,
            calibrator: self.clone(),
        };
        serde_json::to_string_pretty(&file)
            .map_err(|e| CalibratorError::Serialization(e.to_string()))
    }

    /// Parses a model-file JSON document, checking the schema version.
    pub fn from_json(text: &str) -> Result<Calibrator, CalibratorError> {
        let file: ModelFile = serde_json::from_str(text)
            .map_err(|e| CalibratorError::Serialization(e.to_string()))?;
        if file.schema_version != MODEL_SCHEMA_VERSION {
            return Err(CalibratorError::UnsupportedSchema(file.schema_version));
        }
        Ok(file.calibrator)
    }
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    schema_version: u32,
    #[serde(flatten)]
    calibrator: Calibrator,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calibration::fit_temperature;
    use crate::dataset::Sample;

    fn mk(domain: &str, label: usize, f: &[f64], z: &[f64]) -> Sample {
        Sample {
            domain: domain.into(),
            label,
            feature: f.to_vec(),
            logits: z.to_vec(),
        }
    }

    /// Two spatially separated domains: one overconfident (large logit gap,
    /// 60% accurate), one underconfident (small gap, 95% accurate).
    fn two_blob_dataset() -> DomainDataset {
        let mut samples = Vec::new();
        for i in 0..40 {
            let wobble = (i as f64) * 0.01;
            let label = usize::from(i % 10 >= 6); // argmax is 0; 60% correct
            samples.push(mk("hot", label, &[wobble, 0.0], &[2.0, 0.0]));
        }
        for i in 0..40 {
            let wobble = (i as f64) * 0.01;
            let label = usize::from(i % 20 == 19); // argmax is 0; 95% correct
            samples.push(mk("cold", label, &[10.0 + wobble, 0.0], &[0.3, 0.0]));
        }
        DomainDataset::new(samples).unwrap()
    }

    fn temp_model(t: f64) -> TemperatureModel {
        TemperatureModel {
            temperature: t,
            nll_at_t: 0.0,
            search_bounds: calibration::DEFAULT_BOUNDS,
            converged: true,
            warning: None,
        }
    }

    #[test]
    fn set_level_matches_direct_pooled_fit() {
        let ds = two_blob_dataset();
        let cal = fit_set_level(&ds, &FitOptions::default()).unwrap();
        let logits: Vec<&[f64]> = ds.samples().iter().map(|s| s.logits.as_slice()).collect();
        let labels: Vec<usize> = ds.samples().iter().map(|s| s.label).collect();
        let direct =
            fit_temperature(&logits, &labels, &TemperatureFitOptions::default()).unwrap();
        let Calibrator::SetLevel { temp } = &cal else {
            panic!("wrong kind")
        };
        assert_eq!(temp.temperature, direct.temperature);
        assert_eq!(cal.kind_name(), "set_level");
    }

    #[test]
    fn per_domain_weighting_changes_an_imbalanced_fit() {
        // 90 overconfident samples vs 10 underconfident ones: per-sample
        // pooling chases the big domain, per-domain weighting moves the
        // temperature toward the small one.
        let mut samples = Vec::new();
        for i in 0..90 {
            samples.push(mk("big", usize::from(i % 10 >= 6), &[0.0], &[2.0, 0.0]));
        }
        for i in 0..10 {
            samples.push(mk("small", usize::from(i > 8), &[5.0], &[0.4, 0.0]));
        }
        let ds = DomainDataset::new(samples).unwrap();
        let per_sample = fit_set_level(&ds, &FitOptions::default()).unwrap();
        let per_domain = fit_set_level(
            &ds,
            &FitOptions {
                weighting: DomainWeighting::PerDomain,
                ..FitOptions::default()
            },
        )
        .unwrap();
        let t = |c: &Calibrator| match c {
            Calibrator::SetLevel { temp } => temp.temperature,
            _ => unreachable!(),
        };
        assert!(t(&per_domain) < t(&per_sample));
    }

    #[test]
    fn cluster_nn_aligns_clusters_with_domains() {
        let ds = two_blob_dataset();
        let cal = fit_cluster_nn(
            &ds,
            &FitOptions {
                k: 2,
                seed: 5,
                ..FitOptions::default()
            },
        )
        .unwrap();
        let Calibrator::ClusterNn {
            clusters, temps, fallback_clusters, ..
        } = &cal
        else {
            panic!("wrong kind")
        };
        assert!(fallback_clusters.is_empty());

        // Purity: the two domains occupy features near 0 and near 10, so the
        // clusters must recover them nearly perfectly.
        let hot_cluster = clusters.assignments[0];
        let purity = clusters.assignments[..40]
            .iter()
            .filter(|&&a| a == hot_cluster)
            .count()
            + clusters.assignments[40..]
                .iter()
                .filter(|&&a| a != hot_cluster)
                .count();
        assert!(purity >= 76, "purity {purity}/80");

        // The overconfident domain needs t > 1, the underconfident one t < 1.
        let cold_cluster = 1 - hot_cluster;
        assert!(temps[hot_cluster].temperature > 1.0);
        assert!(temps[cold_cluster].temperature < 1.0);
    }

    #[test]
    fn tiny_clusters_fall_back_to_the_pooled_temperature() {
        let mut samples = Vec::new();
        for i in 0..30 {
            samples.push(mk("a", usize::from(i % 10 >= 6), &[0.0, i as f64 * 0.01], &[2.0, 0.0]));
        }
        for i in 0..5 {
            samples.push(mk("b", 0, &[10.0, i as f64 * 0.01], &[0.5, 0.0]));
        }
        let ds = DomainDataset::new(samples).unwrap();
        let opts = FitOptions {
            k: 2,
            seed: 3,
            min_cluster_size: 10,
            ..FitOptions::default()
        };
        let cal = fit_cluster_nn(&ds, &opts).unwrap();
        let Calibrator::ClusterNn {
            temps, fallback_clusters, ..
        } = &cal
        else {
            panic!("wrong kind")
        };
        assert_eq!(fallback_clusters.len(), 1);
        let j = fallback_clusters[0];
        let pooled = pooled_temperature(&ds, &opts).unwrap();
        assert_eq!(temps[j].temperature, pooled.temperature);
        assert!(temps[j].warning.as_deref().unwrap().contains("pooled"));
    }

    #[test]
    fn k_equal_one_reduces_cluster_nn_to_set_level() {
        let ds = two_blob_dataset();
        let opts = FitOptions {
            k: 1,
            seed: 9,
            ..FitOptions::default()
        };
        let nn = fit_cluster_nn(&ds, &opts).unwrap();
        let set = fit_set_level(&ds, &opts).unwrap();
        let (Calibrator::ClusterNn { temps, .. }, Calibrator::SetLevel { temp }) = (&nn, &set)
        else {
            panic!("wrong kinds")
        };
        assert!((temps[0].temperature - temp.temperature).abs() <= 1e-9);
        for s in ds.samples().iter().take(5) {
            assert_eq!(
                nn.resolve_temperature(s).unwrap(),
                set.resolve_temperature(s).unwrap()
            );
        }
    }

    #[test]
    fn ridge_fit_recovers_an_exact_line() {
        // Two points (0, 1) and (1, 2): the unpenalized line is t = x + 1.
        let m = fit_ridge(&[vec![0.0], vec![1.0]], &[1.0, 2.0], 0.0).unwrap();
        assert!((m.weights[0] - 1.0).abs() < 1e-9, "{m:?}");
        assert!((m.intercept - 1.0).abs() < 1e-9, "{m:?}");
        assert!(m.training_mse < 1e-18);
        assert!(m.warning.is_none());
    }

    #[test]
    fn ridge_fit_constant_targets_zero_weights() {
        // With any positive penalty, constant targets give exactly w = 0 and
        // intercept = c.
        let xs = vec![vec![0.0, 1.0], vec![2.0, -1.0], vec![4.0, 3.0]];
        let m = fit_ridge(&xs, &[1.7, 1.7, 1.7], 0.5).unwrap();
        for w in &m.weights {
            assert!(w.abs() < 1e-10, "{m:?}");
        }
        assert!((m.intercept - 1.7).abs() < 1e-10);
    }

    #[test]
    fn ridge_fit_minimum_norm_on_singular_systems() {
        // Three identical rows with lambda = 0: the normal equations are
        // singular; the minimum-norm solution still fits the (consistent)
        // targets.
        let xs = vec![vec![1.0, 1.0], vec![1.0, 1.0], vec![1.0, 1.0]];
        let m = fit_ridge(&xs, &[2.0, 2.0, 2.0], 0.0).unwrap();
        assert!(m.warning.is_some());
        assert!((m.predict_temperature(&[1.0, 1.0]) - 2.0).abs() < 1e-9);
    }

    #[test]
    fn ridge_fit_validates_input() {
        assert!(matches!(
            fit_ridge(&[], &[], 0.1),
            Err(CalibratorError::RegressionInput { .. })
        ));
        assert!(matches!(
            fit_ridge(&[vec![1.0]], &[1.0, 2.0], 0.1),
            Err(CalibratorError::RegressionInput { .. })
        ));
        assert!(matches!(
            fit_ridge(&[vec![1.0]], &[1.0], -1.0),
            Err(CalibratorError::InvalidRidge(_))
        ));
        assert!(matches!(
            fit_ridge(&[vec![1.0], vec![1.0, 2.0]], &[1.0, 2.0], 0.1),
            Err(CalibratorError::RegressionInput { .. })
        ));
        assert!(fit_ridge(&[vec![f64::NAN]], &[1.0], 0.1).is_err());
    }

    #[test]
    fn cluster_regression_interpolates_cluster_temperatures() {
        let ds = two_blob_dataset();
        let cal = fit_cluster_regression(
            &ds,
            &FitOptions {
                k: 2,
                seed: 5,
                ridge_lambda: Some(0.0),
                ..FitOptions::default()
            },
        )
        .unwrap();
        let Calibrator::ClusterRegression {
            clusters,
            temps,
            regression,
            ..
        } = &cal
        else {
            panic!("wrong kind")
        };
        // With two clusters and lambda = 0 the line passes through both
        // (mean feature, temperature) points.
        for (j, (mean, temp)) in clusters.mean_features.iter().zip(temps).enumerate() {
            let predicted = regression.predict_temperature(mean);
            assert!(
                (predicted - temp.temperature).abs() < 1e-6,
                "cluster {j}: {predicted} vs {}",
                temp.temperature
            );
        }
        assert!(regression.training_mse < 1e-12);
    }

    #[test]
    fn cluster_regression_requires_two_clusters() {
        let ds = two_blob_dataset();
        assert!(matches!(
            fit_cluster_regression(
                &ds,
                &FitOptions {
                    k: 1,
                    ..FitOptions::default()
                }
            ),
            Err(CalibratorError::TooFewClusters { k: 1 })
        ));
        // With min_cluster_size above both cluster sizes, no reliable
        // clusters remain.
        assert!(matches!(
            fit_cluster_regression(
                &ds,
                &FitOptions {
                    k: 2,
                    min_cluster_size: 1000,
                    ..FitOptions::default()
                }
            ),
            Err(CalibratorError::TooFewReliableClusters { .. })
        ));
    }

    #[test]
    fn default_ridge_penalty_scales_with_dimension() {
        let ds = two_blob_dataset(); // d = 2
        let auto = fit_cluster_regression(
            &ds,
            &FitOptions {
                k: 2,
                seed: 5,
                ..FitOptions::default()
            },
        )
        .unwrap();
        let explicit = fit_cluster_regression(
            &ds,
            &FitOptions {
                k: 2,
                seed: 5,
                ridge_lambda: Some(2e-3),
                ..FitOptions::default()
            },
        )
        .unwrap();
        let lam = |c: &Calibrator| match c {
            Calibrator::ClusterRegression { regression, .. } => regression.ridge_lambda,
            _ => unreachable!(),
        };
        assert_eq!(lam(&auto), 2e-3);
        let w = |c: &Calibrator| match c {
            Calibrator::ClusterRegression { regression, .. } => regression.weights.clone(),
            _ => unreachable!(),
        };
        assert_eq!(w(&auto), w(&explicit));
    }

    #[test]
    fn regression_predictions_clamp_and_count() {
        let cal = Calibrator::ClusterRegression {
            clusters: ClusterModel {
                centroids: vec![vec![0.0]],
                assignments: vec![0],
                wcss: 0.0,
                wcss_history: vec![0.0],
                mean_features: vec![vec![0.0]],
                seed: 0,
            },
            temps: vec![temp_model(1.0)],
            regression: RegressionModel {
                weights: vec![-1.0],
                intercept: 0.5,
                ridge_lambda: 0.0,
                training_mse: 0.0,
                warning: None,
            },
            clamp_bounds: calibration::DEFAULT_BOUNDS,
            clamp_events: Arc::default(),
        };
        // Feature 1.0 predicts t = -0.5: clamped to the lower bound.
        let s = mk("x", 0, &[1.0], &[2.0, 0.0]);
        assert_eq!(cal.resolve_temperature(&s).unwrap(), 1e-2);
        assert_eq!(cal.clamp_count(), 1);
        // Feature 0.0 predicts t = 0.5: in range, no new clamp event.
        let s2 = mk("x", 0, &[0.0], &[2.0, 0.0]);
        assert_eq!(cal.resolve_temperature(&s2).unwrap(), 0.5);
        assert_eq!(cal.clamp_count(), 1);
    }

    #[test]
    fn ensemble_averages_scaled_logits() {
        // Members at t = 1 and t = 2 on logits [2, 0]: the averaged scaled
        // logits are [1.5, 0], so confidence is softmax([1.5, 0])[0].
        let ens = Calibrator::ensemble(vec![
            Calibrator::SetLevel { temp: temp_model(1.0) },
            Calibrator::SetLevel { temp: temp_model(2.0) },
        ])
        .unwrap();
        let s = mk("x", 0, &[0.0], &[2.0, 0.0]);
        let p = ens.apply(&s).unwrap();
        let expect = 1.5f64.exp() / (1.5f64.exp() + 1.0);
        assert!((p.confidence - expect).abs() < 1e-12);
        assert!((p.confidence - 0.8176).abs() < 5e-5);
        assert_eq!(p.predicted_class, 0);
    }

    #[test]
    fn ensemble_construction_rules() {
        assert!(matches!(
            Calibrator::ensemble(vec![]),
            Err(CalibratorError::EnsembleEmpty)
        ));
        let inner = Calibrator::ensemble(vec![Calibrator::Uncalibrated]).unwrap();
        assert!(matches!(
            Calibrator::ensemble(vec![inner]),
            Err(CalibratorError::EnsembleNested)
        ));
        let ens = Calibrator::ensemble(vec![Calibrator::Uncalibrated]).unwrap();
        let s = mk("x", 0, &[0.0], &[2.0, 0.0]);
        assert!(matches!(
            ens.resolve_temperature(&s),
            Err(CalibratorError::NoScalarTemperature)
        ));
    }

    #[test]
    fn uncalibrated_is_identity() {
        let s = mk("x", 0, &[0.0], &[3.0, 1.0, 0.0]);
        let p = Calibrator::Uncalibrated.apply(&s).unwrap();
        let direct = predict(&s.logits, 1.0).unwrap();
        assert_eq!(p, direct);
    }

    #[test]
    fn model_json_round_trip() {
        let ds = two_blob_dataset();
        for cal in [
            fit_set_level(&ds, &FitOptions::default()).unwrap(),
            fit_cluster_nn(
                &ds,
                &FitOptions {
                    k: 2,
                    seed: 1,
                    ..FitOptions::default()
                },
            )
            .unwrap(),
            fit_cluster_regression(
                &ds,
                &FitOptions {
                    k: 2,
                    seed: 1,
                    ..FitOptions::default()
                },
            )
            .unwrap(),
            fit_ensemble(
                &ds,
                &FitOptions {
                    k: 2,
                    seed: 1,
                    ..FitOptions::default()
                },
            )
            .unwrap(),
            Calibrator::Uncalibrated,
        ] {
            let json = cal.to_json().unwrap();
            assert!(json.contains("\"schema_version\": 1"));
            assert!(json.contains(&format!("\"kind\": \"{}\"", cal.kind_name())));
            let back = Calibrator::from_json(&json).unwrap();
            assert_eq!(back.kind_name(), cal.kind_name());
            for s in ds.samples().iter().take(8) {
                assert_eq!(back.apply(s).unwrap(), cal.apply(s).unwrap());
            }
        }
    }

    #[test]
    fn model_json_rejects_unknown_schema() {
        let json = Calibrator::Uncalibrated
            .to_json()
            .unwrap()
            .replace("\"schema_version\": 1", "\"schema_version\": 42");
        assert!(matches!(
            Calibrator::from_json(&json),
            Err(CalibratorError::UnsupportedSchema(42))
        ));
        assert!(Calibrator::from_json("not json").is_err());
    }

    #[test]
    fn apply_checks_feature_dimensions() {
        let ds = two_blob_dataset();
        let cal = fit_cluster_nn(
            &ds,
            &FitOptions {
                k: 2,
                seed: 1,
                ..FitOptions::default()
            },
        )
        .unwrap();
        let bad = mk("x", 0, &[1.0, 2.0, 3.0], &[1.0, 0.0]);
        assert!(matches!(
            cal.apply(&bad),
            Err(CalibratorError::Cluster(ClusterError::DimensionMismatch { .. }))
        ));
    }
}
