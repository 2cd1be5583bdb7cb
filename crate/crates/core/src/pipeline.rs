//! End-to-end training orchestration.
//!
//! The pipeline order is fixed to keep held-out rows untouched by any fitted
//! statistic: clean, IQR outlier removal, stratified split, min-max fit on
//! the training partition only, oversample the training partition only, then
//! grow the forest. The held-out partition is stored raw; evaluation applies
//! the model's stored normalization on the fly.

use thiserror::Error;

use crate::dataset::{self, CbcRecord, DataError, Dataset};
use crate::forest::{Forest, ForestConfig, ForestError};
use crate::kb::DiseaseClass;
use crate::metrics::{self, EvaluationReport, MetricsError};
use crate::model::{ModelError, SavedModel};
use crate::seeding::derive_seed;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Forest(#[from] ForestError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error("training needs at least 2 classes, found {0}")]
    TooFewClasses(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub test_fraction: f64,
    pub iqr_k: f64,
    /// Root seed; the split, the oversampler, and every tree derive their
    /// own streams from it.
    pub seed: u64,
    pub forest: ForestConfig,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            test_fraction: 0.3,
            iqr_k: 1.5,
            seed: 42,
            forest: ForestConfig::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub model: SavedModel,
    /// Post-clean/IQR records of the training partition, raw scale.
    pub train_records: Vec<CbcRecord>,
    /// Post-clean/IQR records of the held-out partition, raw scale.
    pub test_records: Vec<CbcRecord>,
    /// Report of the trained model on its own training partition.
    pub train_report: EvaluationReport,
    /// Size of the balanced set the forest was grown on.
    pub oversampled_len: usize,
}

/// Runs the full training pipeline on labeled records.
pub fn train_pipeline(
    records: Vec<CbcRecord>,
    cfg: &TrainConfig,
) -> Result<TrainOutcome, PipelineError> {
    let cleaned = dataset::clean(records);
    let filtered = dataset::iqr_filter(cleaned, cfg.iqr_k)?;

    let labels: Vec<DiseaseClass> = filtered
        .iter()
        .map(|r| r.label.ok_or_else(|| DataError::IncompleteRecord(r.sample_id.clone())))
        .collect::<Result<_, _>>()?;
    let mut distinct = labels.clone();
    distinct.sort_by_key(|c| c.index());
    distinct.dedup();
    if distinct.len() < 2 {
        return Err(PipelineError::TooFewClasses(distinct.len()));
    }

    let (train_idx, test_idx) = dataset::stratified_split_indices(
        &labels,
        cfg.test_fraction,
        derive_seed(cfg.seed, "split", 0),
    )?;
    let pick = |idx: &[usize]| -> Vec<CbcRecord> {
        idx.iter().map(|&i| filtered[i].clone()).collect()
    };
    let train_records = pick(&train_idx);
    let test_records = pick(&test_idx);

    let train_ds = Dataset::from_records(&train_records)?.normalize_minmax();
    let normalization = train_ds.normalization.clone().expect("just fitted");
    let balanced = train_ds.oversample(derive_seed(cfg.seed, "oversample", 0))?;

    let forest_cfg = ForestConfig {
        seed: derive_seed(cfg.seed, "forest", 0),
        ..cfg.forest.clone()
    };
    let forest = Forest::fit(&balanced, &forest_cfg)?;
    let model = SavedModel::new(forest, normalization);
    let train_report = evaluate_model(&model, &train_records)?;

    Ok(TrainOutcome {
        model,
        train_records,
        test_records,
        train_report,
        oversampled_len: balanced.len(),
    })
}

/// Evaluates a model on labeled records: normalizes with the model's stored
/// constants, predicts, and reports.
pub fn evaluate_model(
    model: &SavedModel,
    records: &[CbcRecord],
) -> Result<EvaluationReport, PipelineError> {
    let mut truth = Vec::with_capacity(records.len());
    let mut predicted = Vec::with_capacity(records.len());
    for r in records {
        let label =
            r.label.ok_or_else(|| DataError::IncompleteRecord(r.sample_id.clone()))?;
        let (cls, _) = model.predict_record(r)?;
        truth.push(label);
        predicted.push(cls);
    }
    Ok(metrics::report(&metrics::confusion(&truth, &predicted)?)?)
}

/// Labels records with the fuzzy engine, in place.
pub fn label_records(
    labeler: &crate::kb::Labeler,
    records: &mut [CbcRecord],
    tau: f64,
) -> Result<(), crate::kb::LabelError> {
    for r in records.iter_mut() {
        r.label = Some(labeler.label(r, tau)?.cls);
    }
    Ok(())
}
