//! Fuzzy-logic disease labelling for complete blood count (CBC) records,
//! plus the machine-learning pipeline that turns labelled records into a
//! random-forest classifier.
//!
//! The crate is organised around the stages of that pipeline:
//!
//! - [`fuzzy`] — membership functions, linguistic terms, fuzzification
//! - [`inference`] — rule firing, Mamdani aggregation, centroid defuzzification
//! - [`kb`] — the hematology knowledge base: reference ranges, expert rules,
//!   the disease taxonomy, and a crisp oracle used for testing
//! - [`dataset`] — CSV ingestion, cleaning, IQR outlier removal, min-max
//!   normalization, random oversampling, stratified splitting, and a
//!   synthetic record generator
//! - [`forest`] — a from-scratch CART random forest (Gini criterion)
//! - [`metrics`] — confusion matrices, precision/recall/F1 reports
//! - [`model`] — versioned JSON persistence of trained models
//! - [`pipeline`] — the end-to-end training orchestration used by the CLI

pub mod dataset;
pub mod forest;
pub mod fuzzy;
pub mod inference;
pub mod kb;
pub mod metrics;
pub mod model;
pub mod pipeline;
pub mod seeding;

pub use dataset::{CbcRecord, Dataset, GenMode, LabeledSample};
pub use forest::{Forest, ForestConfig};
pub use fuzzy::{FuzzyVariable, LinguisticTerm, MembershipFamily, MembershipFunction};
pub use inference::{FuzzyRule, InferenceResult, OutputVariable, RuleBase};
pub use kb::{DiseaseClass, LabelResult, Labeler};
pub use metrics::{ConfusionMatrix, EvaluationReport};
pub use model::SavedModel;
