//! Versioned JSON persistence of a trained model.
//!
//! The document carries the forest (config, class order, full tree
//! structures) together with the min-max constants fitted on the training
//! partition, so a loaded model normalizes incoming measurements exactly as
//! the training run did and reproduces bit-identical predictions.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::CbcRecord;
use crate::forest::{Forest, ForestError};
use crate::kb::DiseaseClass;

pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("bad model document: {0}")]
    BadDocument(String),
    #[error("unsupported model format version {got} (expected {expected})")]
    UnsupportedVersion { got: u32, expected: u32 },
    #[error(transparent)]
    Forest(#[from] ForestError),
    #[error("record '{0}' is missing core measurements")]
    Incomplete(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SavedModel {
    pub format_version: u32,
    pub feature_names: Vec<String>,
    /// Per-feature `(min, max)` fitted on the training partition.
    pub normalization: Vec<(f64, f64)>,
    pub forest: Forest,
}

impl SavedModel {
    pub fn new(forest: Forest, normalization: Vec<(f64, f64)>) -> Self {
        Self {
            format_version: MODEL_FORMAT_VERSION,
            feature_names: crate::dataset::FEATURE_NAMES.iter().map(|s| s.to_string()).collect(),
            normalization,
            forest,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("model serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        let model: SavedModel =
            serde_json::from_str(text).map_err(|e| ModelError::BadDocument(e.to_string()))?;
        if model.format_version != MODEL_FORMAT_VERSION {
            return Err(ModelError::UnsupportedVersion {
                got: model.format_version,
                expected: MODEL_FORMAT_VERSION,
            });
        }
        Ok(model)
    }

    pub fn save(&self, path: &Path) -> Result<(), ModelError> {
        Ok(std::fs::write(path, self.to_json())?)
    }

    pub fn load(path: &Path) -> Result<Self, ModelError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// Applies the stored normalization to raw feature values.
    pub fn normalize(&self, raw: [f64; 5]) -> [f64; 5] {
        let mut out = raw;
        for (i, x) in out.iter_mut().enumerate() {
            let (lo, hi) = self.normalization[i];
            *x = if hi > lo { (*x - lo) / (hi - lo) } else { 0.0 };
        }
        out
    }

    /// Normalizes and predicts; also returns the per-class vote fractions in
    /// the forest's class order.
    pub fn predict_values(
        &self,
        raw: [f64; 5],
    ) -> Result<(DiseaseClass, Vec<(DiseaseClass, f64)>), ModelError> {
        let x = self.normalize(raw);
        let cls = self.forest.predict(&x)?;
        let proba = self.forest.predict_proba(&x)?;
        let pairs = self.forest.class_order.iter().copied().zip(proba).collect();
        Ok((cls, pairs))
    }

    pub fn predict_record(
        &self,
        record: &CbcRecord,
    ) -> Result<(DiseaseClass, Vec<(DiseaseClass, f64)>), ModelError> {
        let raw = record
            .core_values()
            .ok_or_else(|| ModelError::Incomplete(record.sample_id.clone()))?;
        self.predict_values(raw)
    }
}
