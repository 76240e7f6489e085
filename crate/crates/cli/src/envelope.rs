//! The model file the CLI reads and writes: the core calibrator document
//! plus an optional feature standardization block. Core models (no
//! standardization) load unchanged, so the envelope is a strict superset of
//! the library's own serialization.

use std::path::Path;

use serde::{Deserialize, Serialize};
use shiftcal::calibrators::{Calibrator, MODEL_SCHEMA_VERSION};
use shiftcal::dataset::{DomainDataset, Sample};

use crate::error::{read_to_string, write_file, CliError};

/// Per-dimension z-score parameters, fit on the calibration set and applied
/// to every feature the model sees afterwards.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Standardization {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl Standardization {
    /// Population mean/std per feature dimension. Dimensions with (near-)zero
    /// spread keep scale 1 so constant features pass through centered.
    pub fn fit(ds: &DomainDataset) -> Standardization {
        let d = ds.feature_dim();
        let n = ds.len() as f64;
        let mut mean = vec![0.0; d];
        for s in ds.samples() {
            for (m, &x) in mean.iter_mut().zip(&s.feature) {
                *m += x;
            }
        }
        for m in mean.iter_mut() {
            *m /= n;
        }
        let mut var = vec![0.0; d];
        for s in ds.samples() {
            for ((v, &m), &x) in var.iter_mut().zip(&mean).zip(&s.feature) {
                *v += (x - m) * (x - m);
            }
        }
        let std = var
            .iter()
            .map(|&v| {
                let s = (v / n).sqrt();
                if s < 1e-12 {
                    1.0
                } else {
                    s
                }
            })
            .collect();
        Standardization { mean, std }
    }

    pub fn feature_dim(&self) -> usize {
        self.mean.len()
    }

    pub fn transform_feature(&self, feature: &mut [f64]) {
        for ((x, &m), &s) in feature.iter_mut().zip(&self.mean).zip(&self.std) {
            *x = (*x - m) / s;
        }
    }

    pub fn transform_sample(&self, sample: &Sample) -> Sample {
        let mut out = sample.clone();
        self.transform_feature(&mut out.feature);
        out
    }

    pub fn transform_dataset(&self, ds: &DomainDataset) -> Result<DomainDataset, CliError> {
        let samples = ds
            .samples()
            .iter()
            .map(|s| self.transform_sample(s))
            .collect();
        Ok(DomainDataset::new(samples)?)
    }

    fn validate(&self, context: &str) -> Result<(), CliError> {
        if self.mean.len() != self.std.len() {
            return Err(CliError::validation(format!(
                "{context}: standardization mean has {} entries but std has {}",
                self.mean.len(),
                self.std.len()
            )));
        }
        if self.mean.is_empty() {
            return Err(CliError::validation(format!(
                "{context}: standardization block is empty"
            )));
        }
        for (i, (&m, &s)) in self.mean.iter().zip(&self.std).enumerate() {
            if !m.is_finite() || !s.is_finite() || s <= 0.0 {
                return Err(CliError::validation(format!(
                    "{context}: standardization entry {i} is not usable (mean {m}, std {s})"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
pub struct ModelEnvelope {
    pub schema_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub standardization: Option<Standardization>,
    #[serde(flatten)]
    pub calibrator: Calibrator,
}

impl ModelEnvelope {
    pub fn new(calibrator: Calibrator, standardization: Option<Standardization>) -> Self {
        ModelEnvelope {
            schema_version: MODEL_SCHEMA_VERSION,
            standardization,
            calibrator,
        }
    }

    pub fn save(&self, path: &Path) -> Result<(), CliError> {
        let mut text =
            serde_json::to_string_pretty(self).map_err(|e| CliError::validation(e.to_string()))?;
        text.push('\n');
        write_file(path, text)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = read_to_string(path)?;
        let envelope: ModelEnvelope =
            serde_json::from_str(&text).map_err(|e| CliError::from(e).at(path))?;
        if envelope.schema_version != MODEL_SCHEMA_VERSION {
            return Err(CliError::validation(format!(
                "{}: model schema version {} is not supported (expected {})",
                path.display(),
                envelope.schema_version,
                MODEL_SCHEMA_VERSION
            )));
        }
        if let Some(st) = &envelope.standardization {
            st.validate(&path.display().to_string())?;
        }
        Ok(envelope)
    }

    /// Calibrated prediction with the envelope's preprocessing applied.
    pub fn apply(&self, sample: &Sample) -> Result<shiftcal::Prediction, CliError> {
        match &self.standardization {
            Some(st) => {
                if st.feature_dim() != sample.feature.len() {
                    return Err(CliError::validation(format!(
                        "model standardization covers {} feature dimensions but the sample has {}",
                        st.feature_dim(),
                        sample.feature.len()
                    )));
                }
                Ok(self.calibrator.apply(&st.transform_sample(sample))?)
            }
            None => Ok(self.calibrator.apply(sample)?),
        }
    }
}
