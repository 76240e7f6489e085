//! Synthetic domain-shift scenarios with a known ground truth.
//!
//! Every domain draws features as `x = class_mean[y] + shift + scale * eps`
//! with standard normal `eps` and labels cycling through the classes, so the
//! class-conditional geometry is identical everywhere and only the additive
//! `shift` (and noise `scale`) distinguishes domains. That makes the
//! correct posterior a known function of `x - shift`, which is what lets
//! tests state which calibration transfers ought to work.
//!
//! A scenario splits domains into three roles: one or more *source* domains
//! train a linear classifier (and provide the source-only baseline's labeled
//! holdout), *calibration* domains contribute small labeled sets that
//! transfer methods may use, and *target* domains are where calibration is
//! actually wanted: a large unlabeled evaluation split plus a small labeled
//! holdout reserved for the oracle reference. All randomness is derived
//! from the configured seed, so a configuration pins every byte of the
//! output.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::{
    select_domains, split_dataset, DatasetError, DomainDataset, Sample, SplitSpec,
};
use crate::linalg;
use crate::rng::{derive_seed, SplitMix64};

/// Share of each domain reserved as its small labeled split.
pub const SCENARIO_SMALL_FRACTION: f64 = 0.2;

/// Per-sample ridge factor for the classifier's least-squares fit; keeps the
/// normal equations well-posed without visibly biasing the fit.
const CLASSIFIER_RIDGE: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("invalid scenario configuration: {detail}")]
    InvalidConfig { detail: String },
    #[error("class {class} has no training samples")]
    MissingClass { class: usize },
    #[error("training features are degenerate; the classifier fit has no solution")]
    DegenerateFeatures,
    #[error("classifier expects {expected}-dimensional features, got {got}")]
    DimensionMismatch { got: usize, expected: usize },
    #[error("classifier has {expected} classes but the dataset has {got}")]
    ClassCountMismatch { got: usize, expected: usize },
    #[error("unknown preset '{0}'; available: bridge, near, control")]
    UnknownPreset(String),
    #[error(transparent)]
    Dataset(#[from] DatasetError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DomainRole {
    Source,
    Calibration,
    Target,
}

/// One domain's sampling law: the shared class means, displaced by `shift`,
/// with isotropic noise `covariance_scale`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DomainSpec {
    pub name: String,
    pub role: DomainRole,
    /// `num_classes` rows of `feature_dim` coordinates. Must be identical
    /// across domains; shift is the only thing allowed to differ.
    pub class_means: Vec<Vec<f64>>,
    /// Standard deviation of the isotropic feature noise.
    pub covariance_scale: f64,
    /// Added to every feature of every class in this domain.
    pub shift: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SynthConfig {
    pub num_classes: usize,
    pub feature_dim: usize,
    pub samples_per_domain: usize,
    pub seed: u64,
    pub domains: Vec<DomainSpec>,
}

impl SynthConfig {
    pub fn validate(&self) -> Result<(), SynthError> {
        let fail = |detail: String| Err(SynthError::InvalidConfig { detail });
        if self.num_classes < 2 {
            return fail(format!("need at least 2 classes, got {}", self.num_classes));
        }
        if self.feature_dim < 1 {
            return fail("feature_dim must be at least 1".into());
        }
        if self.samples_per_domain < 1 {
            return fail("samples_per_domain must be at least 1".into());
        }
        if self.domains.is_empty() {
            return fail("at least one domain is required".into());
        }
        let mut names = std::collections::BTreeSet::new();
        for dom in &self.domains {
            if dom.name.is_empty() {
                return fail("domain names must be non-empty".into());
            }
            if !names.insert(dom.name.as_str()) {
                return fail(format!("duplicate domain name '{}'", dom.name));
            }
            if dom.class_means.len() != self.num_classes {
                return fail(format!(
                    "domain '{}' has {} class means for {} classes",
                    dom.name,
                    dom.class_means.len(),
                    self.num_classes
                ));
            }
            for (c, mean) in dom.class_means.iter().enumerate() {
                if mean.len() != self.feature_dim {
                    return fail(format!(
                        "domain '{}' class {c} mean has {} coordinates, expected {}",
                        dom.name,
                        mean.len(),
                        self.feature_dim
                    ));
                }
                if mean.iter().any(|v| !v.is_finite()) {
                    return fail(format!("domain '{}' class {c} mean is not finite", dom.name));
                }
            }
            if dom.shift.len() != self.feature_dim {
                return fail(format!(
                    "domain '{}' shift has {} coordinates, expected {}",
                    dom.name,
                    dom.shift.len(),
                    self.feature_dim
                ));
            }
            if dom.shift.iter().any(|v| !v.is_finite()) {
                return fail(format!("domain '{}' shift is not finite", dom.name));
            }
            if !dom.covariance_scale.is_finite() || dom.covariance_scale <= 0.0 {
                return fail(format!(
                    "domain '{}' covariance_scale must be positive, got {}",
                    dom.name, dom.covariance_scale
                ));
            }
        }
        // Shift is the only permitted difference between domains; unequal
        // class geometry would silently break the shared-posterior premise.
        let reference = &self.domains[0].class_means;
        for dom in &self.domains[1..] {
            if &dom.class_means != reference {
                return fail(format!(
                    "domain '{}' has different class means than '{}'; domains may differ only in shift and noise scale",
                    dom.name, self.domains[0].name
                ));
            }
        }
        for role in [DomainRole::Source, DomainRole::Calibration, DomainRole::Target] {
            if !self.domains.iter().any(|d| d.role == role) {
                return fail(format!("no domain has role {role:?}"));
            }
        }
        Ok(())
    }

    fn names_with_role(&self, role: DomainRole) -> Vec<&str> {
        self.domains
            .iter()
            .filter(|d| d.role == role)
            .map(|d| d.name.as_str())
            .collect()
    }
}

/// Draws every domain's samples. Labels cycle `0, 1, ..., K-1, 0, ...`, so
/// per-domain class counts differ by at most one. Logits are zero; a
/// classifier fills them in later. Each domain consumes an independent
/// generator derived from the seed and its position, so adding a domain
/// never perturbs another domain's draws.
pub fn generate(cfg: &SynthConfig) -> Result<DomainDataset, SynthError> {
    cfg.validate()?;
    let mut samples = Vec::with_capacity(cfg.domains.len() * cfg.samples_per_domain);
    for (di, dom) in cfg.domains.iter().enumerate() {
        let mut rng = SplitMix64::new(derive_seed(cfg.seed, "synth-domain", di as u64));
        for i in 0..cfg.samples_per_domain {
            let label = i % cfg.num_classes;
            let feature: Vec<f64> = (0..cfg.feature_dim)
                .map(|j| {
                    dom.class_means[label][j]
                        + dom.shift[j]
                        + dom.covariance_scale * rng.next_gaussian()
                })
                .collect();
            samples.push(Sample {
                domain: dom.name.clone(),
                label,
                feature,
                logits: vec![0.0; cfg.num_classes],
            });
        }
    }
    Ok(DomainDataset::new(samples)?)
}

/// Multinomial linear probe: one weight row plus bias per class, fit by
/// ridge least squares against one-hot labels.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LinearClassifier {
    /// `num_classes` rows of `feature_dim + 1` coefficients, bias last.
    pub weights: Vec<Vec<f64>>,
}

impl LinearClassifier {
    pub fn feature_dim(&self) -> usize {
        self.weights[0].len() - 1
    }

    pub fn num_classes(&self) -> usize {
        self.weights.len()
    }

    pub fn logits(&self, feature: &[f64]) -> Result<Vec<f64>, SynthError> {
        let d = self.feature_dim();
        if feature.len() != d {
            return Err(SynthError::DimensionMismatch {
                got: feature.len(),
                expected: d,
            });
        }
        Ok(self
            .weights
            .iter()
            .map(|w| w[..d].iter().zip(feature).map(|(a, b)| a * b).sum::<f64>() + w[d])
            .collect())
    }
}

/// Least-squares one-hot regression with a small ridge term (`1e-6` per
/// sample) shared across classes. Every class must appear in the training
/// data.
#[allow(clippy::needless_range_loop)] // Gram-matrix assembly in index form
pub fn fit_linear_classifier(ds: &DomainDataset) -> Result<LinearClassifier, SynthError> {
    let d = ds.feature_dim();
    let k = ds.num_classes();
    let mut counts = vec![0usize; k];
    for s in ds.samples() {
        counts[s.label] += 1;
    }
    if let Some(class) = counts.iter().position(|&c| c == 0) {
        return Err(SynthError::MissingClass { class });
    }

    // One shared Gram matrix; only the right-hand side differs per class.
    let w = d + 1;
    let mut gram = vec![vec![0.0; w]; w];
    let mut rhs = vec![vec![0.0; w]; k];
    for s in ds.samples() {
        let aug = |j: usize| if j < d { s.feature[j] } else { 1.0 };
        for i in 0..w {
            let xi = aug(i);
            rhs[s.label][i] += xi;
            for j in 0..w {
                gram[i][j] += xi * aug(j);
            }
        }
    }
    let lambda = CLASSIFIER_RIDGE * ds.len() as f64;
    for i in 0..w {
        gram[i][i] += lambda;
    }

    let mut weights = Vec::with_capacity(k);
    for class_rhs in &rhs {
        weights.push(linalg::solve_lu(&gram, class_rhs, 1e-12).ok_or(SynthError::DegenerateFeatures)?);
    }
    Ok(LinearClassifier { weights })
}

/// Returns a copy of `ds` with logits replaced by the classifier's outputs.
pub fn apply_classifier(
    ds: &DomainDataset,
    clf: &LinearClassifier,
) -> Result<DomainDataset, SynthError> {
    if ds.feature_dim() != clf.feature_dim() {
        return Err(SynthError::DimensionMismatch {
            got: ds.feature_dim(),
            expected: clf.feature_dim(),
        });
    }
    if ds.num_classes() != clf.num_classes() {
        return Err(SynthError::ClassCountMismatch {
            got: ds.num_classes(),
            expected: clf.num_classes(),
        });
    }
    let mut samples = Vec::with_capacity(ds.len());
    for s in ds.samples() {
        samples.push(Sample {
            logits: clf.logits(&s.feature)?,
            ..s.clone()
        });
    }
    Ok(DomainDataset::new(samples)?)
}

/// A complete experimental setup: five splits sharing one classifier.
#[derive(Debug, Clone)]
pub struct Scenario {
    /// 80% of each source domain; what the classifier was trained on.
    pub source_large: DomainDataset,
    /// 20% of each source domain; the source-only baseline's labeled
    /// holdout.
    pub source_small: DomainDataset,
    /// 20% of each calibration domain; all that transfer methods may see.
    pub cal_small: DomainDataset,
    /// 80% of each target domain; the evaluation set.
    pub target_large: DomainDataset,
    /// 20% of each target domain; labeled holdout reserved for the oracle
    /// reference.
    pub target_small: DomainDataset,
    pub classifier: LinearClassifier,
}

/// Generates, splits, trains the classifier on the large source split, and
/// stamps its logits onto all five splits. The calibration domains' large
/// halves are deliberately discarded: the protocol assumes calibration data
/// is scarce.
pub fn make_scenario(cfg: &SynthConfig) -> Result<Scenario, SynthError> {
    let full = generate(cfg)?;
    let split_role = |role: DomainRole, idx: u64| {
        let pool = select_domains(&full, &cfg.names_with_role(role))?;
        Ok::<_, SynthError>(split_dataset(
            &pool,
            &SplitSpec {
                fraction_small: SCENARIO_SMALL_FRACTION,
                seed: derive_seed(cfg.seed, "scenario-split", idx),
            },
        )?)
    };
    let (source_large, source_small) = split_role(DomainRole::Source, 0)?;
    let (_cal_large, cal_small) = split_role(DomainRole::Calibration, 1)?;
    let (target_large, target_small) = split_role(DomainRole::Target, 2)?;

    let classifier = fit_linear_classifier(&source_large)?;
    Ok(Scenario {
        source_large: apply_classifier(&source_large, &classifier)?,
        source_small: apply_classifier(&source_small, &classifier)?,
        cal_small: apply_classifier(&cal_small, &classifier)?,
        target_large: apply_classifier(&target_large, &classifier)?,
        target_small: apply_classifier(&target_small, &classifier)?,
        classifier,
    })
}

/// Equilateral triangle of class means, side 2, in the plane.
fn triangle_means() -> Vec<Vec<f64>> {
    vec![
        vec![0.0, 0.0],
        vec![2.0, 0.0],
        vec![1.0, 1.7320508075688772],
    ]
}

fn domain(name: &str, role: DomainRole, shift: [f64; 2]) -> DomainSpec {
    DomainSpec {
        name: name.into(),
        role,
        class_means: triangle_means(),
        covariance_scale: 0.6,
        shift: shift.to_vec(),
    }
}

/// Named configurations used throughout the docs and tests:
///
/// * `bridge`: calibration domains sit between source and target along one
///   axis, so transfer has something to extrapolate from;
/// * `near`: the target sits next to the source, so the source-only
///   baseline is already close to optimal;
/// * `control`: no shift anywhere; every method should tie.
///
/// All presets use seed 0 and 600 samples per domain; callers override the
/// public fields afterwards.
pub fn preset(name: &str) -> Result<SynthConfig, SynthError> {
    let domains = match name {
        "bridge" => vec![
            domain("src", DomainRole::Source, [0.0, 0.0]),
            domain("cal_a", DomainRole::Calibration, [2.5, 0.0]),
            domain("cal_b", DomainRole::Calibration, [5.0, 0.0]),
            domain("tgt", DomainRole::Target, [6.5, 0.0]),
        ],
        "near" => vec![
            domain("src", DomainRole::Source, [0.0, 0.0]),
            domain("cal_a", DomainRole::Calibration, [2.5, 0.0]),
            domain("cal_b", DomainRole::Calibration, [5.0, 0.0]),
            domain("tgt", DomainRole::Target, [0.5, 0.0]),
        ],
        "control" => vec![
            domain("src", DomainRole::Source, [0.0, 0.0]),
            domain("cal_a", DomainRole::Calibration, [0.0, 0.0]),
            domain("cal_b", DomainRole::Calibration, [0.0, 0.0]),
            domain("tgt", DomainRole::Target, [0.0, 0.0]),
        ],
        other => return Err(SynthError::UnknownPreset(other.to_string())),
    };
    Ok(SynthConfig {
        num_classes: 3,
        feature_dim: 2,
        samples_per_domain: 600,
        seed: 0,
        domains,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_config() -> SynthConfig {
        SynthConfig {
            num_classes: 2,
            feature_dim: 1,
            samples_per_domain: 40,
            seed: 7,
            domains: vec![
                DomainSpec {
                    name: "s".into(),
                    role: DomainRole::Source,
                    class_means: vec![vec![-2.0], vec![2.0]],
                    covariance_scale: 0.5,
                    shift: vec![0.0],
                },
                DomainSpec {
                    name: "c".into(),
                    role: DomainRole::Calibration,
                    class_means: vec![vec![-2.0], vec![2.0]],
                    covariance_scale: 0.5,
                    shift: vec![1.0],
                },
                DomainSpec {
                    name: "t".into(),
                    role: DomainRole::Target,
                    class_means: vec![vec![-2.0], vec![2.0]],
                    covariance_scale: 0.5,
                    shift: vec![2.0],
                },
            ],
        }
    }

    #[test]
    fn generate_is_deterministic_and_balanced() {
        let cfg = tiny_config();
        let a = generate(&cfg).unwrap();
        let b = generate(&cfg).unwrap();
        assert_eq!(a.samples(), b.samples());
        assert_eq!(a.len(), 120);
        assert_eq!(a.num_classes(), 2);
        for (_, indices) in a.domain_indices() {
            let ones = indices.iter().filter(|&&i| a.samples()[i].label == 1).count();
            assert_eq!(indices.len(), 40);
            assert!(ones.abs_diff(indices.len() - ones) <= 1);
        }
        for s in a.samples() {
            assert!(s.feature[0].is_finite());
            assert_eq!(s.logits, vec![0.0, 0.0]);
        }
    }

    #[test]
    fn shift_moves_every_class_uniformly() {
        // Empirical class means must track mean + shift in each domain; the
        // class geometry itself never changes.
        let mut cfg = tiny_config();
        cfg.samples_per_domain = 2000;
        let ds = generate(&cfg).unwrap();
        for (di, dom) in cfg.domains.iter().enumerate() {
            let _ = di;
            for class in 0..2 {
                let vals: Vec<f64> = ds
                    .samples()
                    .iter()
                    .filter(|s| s.domain == dom.name && s.label == class)
                    .map(|s| s.feature[0])
                    .collect();
                let mean = vals.iter().sum::<f64>() / vals.len() as f64;
                let expected = dom.class_means[class][0] + dom.shift[0];
                // Standard error is 0.5 / sqrt(1000); 5 sigma leaves huge
                // margin.
                assert!(
                    (mean - expected).abs() < 0.08,
                    "domain {} class {class}: {mean} vs {expected}",
                    dom.name
                );
            }
        }
    }

    #[test]
    fn adding_a_domain_does_not_perturb_existing_draws() {
        let cfg = tiny_config();
        let base = generate(&cfg).unwrap();
        let mut extended = cfg.clone();
        extended.domains.push(DomainSpec {
            name: "extra".into(),
            role: DomainRole::Target,
            class_means: vec![vec![-2.0], vec![2.0]],
            covariance_scale: 0.5,
            shift: vec![5.0],
        });
        let bigger = generate(&extended).unwrap();
        let first_three: Vec<_> = bigger
            .samples()
            .iter()
            .filter(|s| s.domain != "extra")
            .cloned()
            .collect();
        assert_eq!(base.samples(), &first_three[..]);
    }

    #[test]
    fn config_validation_rejects_bad_geometry() {
        let ok = tiny_config();
        assert!(ok.validate().is_ok());

        let mut bad = tiny_config();
        bad.domains[1].class_means = vec![vec![-2.0], vec![2.5]];
        assert!(matches!(bad.validate(), Err(SynthError::InvalidConfig { detail }) if detail.contains("class means")));

        let mut bad = tiny_config();
        bad.domains[0].shift = vec![0.0, 0.0];
        assert!(bad.validate().is_err());

        let mut bad = tiny_config();
        bad.domains[2].role = DomainRole::Source;
        assert!(matches!(bad.validate(), Err(SynthError::InvalidConfig { detail }) if detail.contains("Target")));

        let mut bad = tiny_config();
        bad.domains[1].name = "s".into();
        assert!(matches!(bad.validate(), Err(SynthError::InvalidConfig { detail }) if detail.contains("duplicate")));

        let mut bad = tiny_config();
        bad.domains[0].covariance_scale = 0.0;
        assert!(bad.validate().is_err());

        let mut bad = tiny_config();
        bad.num_classes = 1;
        assert!(bad.validate().is_err());

        let mut bad = tiny_config();
        bad.domains[0].class_means[0][0] = f64::NAN;
        assert!(bad.validate().is_err());
    }

    #[test]
    fn classifier_interpolates_one_point_per_class() {
        // Three points, three classes, three parameters per class: the fit
        // is (up to the tiny ridge) exact interpolation of the one-hot
        // targets, so each point's top logit is its own class.
        let ds = DomainDataset::new(vec![
            Sample {
                domain: "d".into(),
                label: 0,
                feature: vec![0.0, 0.0],
                logits: vec![0.0; 3],
            },
            Sample {
                domain: "d".into(),
                label: 1,
                feature: vec![1.0, 0.0],
                logits: vec![0.0; 3],
            },
            Sample {
                domain: "d".into(),
                label: 2,
                feature: vec![0.0, 1.0],
                logits: vec![0.0; 3],
            },
        ])
        .unwrap();
        let clf = fit_linear_classifier(&ds).unwrap();
        for s in ds.samples() {
            let z = clf.logits(&s.feature).unwrap();
            let argmax = z
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
                .unwrap()
                .0;
            assert_eq!(argmax, s.label);
            assert!((z[s.label] - 1.0).abs() < 1e-3, "{z:?}");
        }
    }

    #[test]
    fn classifier_separates_well_spread_blobs() {
        let mut cfg = tiny_config();
        cfg.samples_per_domain = 400;
        for d in &mut cfg.domains {
            d.covariance_scale = 0.3;
        }
        let ds = select_domains(&generate(&cfg).unwrap(), &["s"]).unwrap();
        let clf = fit_linear_classifier(&ds).unwrap();
        let scored = apply_classifier(&ds, &clf).unwrap();
        let correct = scored
            .samples()
            .iter()
            .filter(|s| {
                let argmax = s
                    .logits
                    .iter()
                    .enumerate()
                    .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
                    .unwrap()
                    .0;
                argmax == s.label
            })
            .count();
        // Means at -2 and 2 with sigma 0.3: essentially perfectly separable.
        assert!(correct >= 395, "{correct}/400");
    }

    #[test]
    fn classifier_requires_every_class() {
        let ds = DomainDataset::new(vec![
            Sample {
                domain: "d".into(),
                label: 0,
                feature: vec![0.0],
                logits: vec![0.0; 3],
            },
            Sample {
                domain: "d".into(),
                label: 1,
                feature: vec![1.0],
                logits: vec![0.0; 3],
            },
        ])
        .unwrap();
        assert!(matches!(
            fit_linear_classifier(&ds),
            Err(SynthError::MissingClass { class: 2 })
        ));
    }

    #[test]
    fn apply_classifier_checks_shapes() {
        let cfg = tiny_config();
        let ds = generate(&cfg).unwrap();
        let clf = fit_linear_classifier(&ds).unwrap();
        let wide = DomainDataset::new(vec![Sample {
            domain: "d".into(),
            label: 0,
            feature: vec![0.0, 1.0],
            logits: vec![0.0, 0.0],
        }])
        .unwrap();
        assert!(matches!(
            apply_classifier(&wide, &clf),
            Err(SynthError::DimensionMismatch { .. })
        ));
        let many_classes = DomainDataset::new(vec![Sample {
            domain: "d".into(),
            label: 0,
            feature: vec![0.0],
            logits: vec![0.0, 0.0, 0.0],
        }])
        .unwrap();
        assert!(matches!(
            apply_classifier(&many_classes, &clf),
            Err(SynthError::ClassCountMismatch { .. })
        ));
    }

    #[test]
    fn scenario_splits_have_the_documented_shapes() {
        let mut cfg = tiny_config();
        cfg.samples_per_domain = 50;
        let sc = make_scenario(&cfg).unwrap();
        assert_eq!(sc.source_large.len(), 40);
        assert_eq!(sc.source_small.len(), 10);
        assert_eq!(sc.cal_small.len(), 10);
        assert_eq!(sc.target_large.len(), 40);
        assert_eq!(sc.target_small.len(), 10);
        assert_eq!(sc.source_large.domains().collect::<Vec<_>>(), vec!["s"]);
        assert_eq!(sc.cal_small.domains().collect::<Vec<_>>(), vec!["c"]);
        assert_eq!(sc.target_large.domains().collect::<Vec<_>>(), vec!["t"]);
        // All five splits carry classifier logits, not the zero
        // placeholders.
        for split in [
            &sc.source_large,
            &sc.source_small,
            &sc.cal_small,
            &sc.target_large,
            &sc.target_small,
        ] {
            assert!(split
                .samples()
                .iter()
                .all(|s| s.logits.iter().any(|&z| z != 0.0)));
        }
    }

    #[test]
    fn scenario_is_deterministic() {
        let cfg = tiny_config();
        let a = make_scenario(&cfg).unwrap();
        let b = make_scenario(&cfg).unwrap();
        assert_eq!(a.target_large.samples(), b.target_large.samples());
        assert_eq!(a.classifier.weights, b.classifier.weights);
        let mut other = cfg;
        other.seed = 8;
        let c = make_scenario(&other).unwrap();
        assert_ne!(a.target_large.samples(), c.target_large.samples());
    }

    #[test]
    fn presets_are_valid_and_distinct() {
        for name in ["bridge", "near", "control"] {
            let cfg = preset(name).unwrap();
            cfg.validate().unwrap();
            assert_eq!(cfg.domains.len(), 4);
            assert_eq!(cfg.num_classes, 3);
        }
        let control = preset("control").unwrap();
        assert!(control
            .domains
            .iter()
            .all(|d| d.shift.iter().all(|&v| v == 0.0)));
        let bridge = preset("bridge").unwrap();
        assert!(bridge.domains.iter().any(|d| d.shift[0] > 6.0));
        assert!(matches!(
            preset("nope"),
            Err(SynthError::UnknownPreset(_))
        ));
    }
}
