//! Confusion matrices and classification reports.
//!
//! A [`ConfusionMatrix`] counts samples by (true class, predicted class);
//! rows are truth, columns are predictions. [`report`] derives per-class
//! precision/recall/F1 with supports, overall accuracy, and support-weighted
//! averages. A class never predicted (or never present) has a zero
//! denominator; its metric is reported as 0 and flagged undefined rather
//! than poisoning the averages with NaN.

use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::kb::DiseaseClass;

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("label sequences differ in length: {truth} vs {predicted}")]
    LengthMismatch { truth: usize, predicted: usize },
    #[error("no samples to evaluate")]
    Empty,
    #[error("bad confusion matrix document: {0}")]
    BadDocument(String),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

/// Row-major grid of counts; `counts[i][j]` is the number of samples of true
/// class `i` predicted as class `j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub classes: Vec<String>,
    pub counts: Vec<Vec<u64>>,
}

impl ConfusionMatrix {
    pub fn new(classes: Vec<String>) -> Self {
        let k = classes.len();
        Self { classes, counts: vec![vec![0; k]; k] }
    }

    /// Builds the matrix from paired label sequences over the canonical
    /// class order (restricted to the classes that actually occur).
    pub fn from_disease_labels(
        truth: &[DiseaseClass],
        predicted: &[DiseaseClass],
    ) -> Result<Self, MetricsError> {
        if truth.len() != predicted.len() {
            return Err(MetricsError::LengthMismatch {
                truth: truth.len(),
                predicted: predicted.len(),
            });
        }
        if truth.is_empty() {
            return Err(MetricsError::Empty);
        }
        let mut observed: Vec<DiseaseClass> = truth.iter().chain(predicted).copied().collect();
        observed.sort_by_key(|c| c.index());
        observed.dedup();
        let index_of = |c: DiseaseClass| observed.iter().position(|&o| o == c).unwrap();
        let mut cm =
            Self::new(observed.iter().map(|c| c.short_name().to_string()).collect());
        for (&t, &p) in truth.iter().zip(predicted) {
            cm.counts[index_of(t)][index_of(p)] += 1;
        }
        Ok(cm)
    }

    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn trace(&self) -> u64 {
        (0..self.class_count()).map(|i| self.counts[i][i]).sum()
    }

    pub fn row_sum(&self, i: usize) -> u64 {
        self.counts[i].iter().sum()
    }

    pub fn col_sum(&self, j: usize) -> u64 {
        self.counts.iter().map(|row| row[j]).sum()
    }

    /// Reads the CSV layout written by [`ConfusionMatrix::to_csv`]: a header
    /// `true_class,<predicted class names...>` and one row of counts per
    /// true class, in the same class order.
    pub fn from_csv_reader<R: Read>(reader: R) -> Result<Self, MetricsError> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
        let headers = rdr.headers()?.clone();
        if headers.len() < 2 {
            return Err(MetricsError::BadDocument("expected at least one class column".into()));
        }
        let classes: Vec<String> = headers.iter().skip(1).map(str::to_string).collect();
        let k = classes.len();
        let mut counts = Vec::with_capacity(k);
        let mut row_names = Vec::with_capacity(k);
        for row in rdr.records() {
            let row = row?;
            if row.len() != k + 1 {
                return Err(MetricsError::BadDocument(format!(
                    "row '{}' has {} cells, expected {}",
                    row.get(0).unwrap_or(""),
                    row.len(),
                    k + 1
                )));
            }
            row_names.push(row.get(0).unwrap_or("").to_string());
            let parsed: Result<Vec<u64>, _> =
                row.iter().skip(1).map(|c| c.trim().parse::<u64>()).collect();
            counts.push(parsed.map_err(|e| {
                MetricsError::BadDocument(format!("non-integer count: {e}"))
            })?);
        }
        if row_names != classes {
            return Err(MetricsError::BadDocument(
                "row order must match the column order".into(),
            ));
        }
        Ok(Self { classes, counts })
    }

    pub fn from_csv_path(path: &Path) -> Result<Self, MetricsError> {
        Self::from_csv_reader(std::fs::File::open(path)?)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("true_class");
        for c in &self.classes {
            out.push(',');
            out.push_str(c);
        }
        out.push('\n');
        for (i, row) in self.counts.iter().enumerate() {
            out.push_str(&self.classes[i]);
            for &v in row {
                out.push(',');
                out.push_str(&v.to_string());
            }
            out.push('\n');
        }
        out
    }
}

/// Builds a confusion matrix from paired label sequences.
pub fn confusion(
    truth: &[DiseaseClass],
    predicted: &[DiseaseClass],
) -> Result<ConfusionMatrix, MetricsError> {
    ConfusionMatrix::from_disease_labels(truth, predicted)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub class: String,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: u64,
    /// No sample was ever predicted as this class (zero column).
    pub precision_undefined: bool,
    /// No sample of this class exists (zero row).
    pub recall_undefined: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub per_class: Vec<ClassMetrics>,
    pub accuracy: f64,
    pub weighted_precision: f64,
    pub weighted_recall: f64,
    pub weighted_f1: f64,
    pub total: u64,
    pub matrix: ConfusionMatrix,
}

/// Derives the full report from a confusion matrix.
pub fn report(cm: &ConfusionMatrix) -> Result<EvaluationReport, MetricsError> {
    let total = cm.total();
    if total == 0 {
        return Err(MetricsError::Empty);
    }
    let mut per_class = Vec::with_capacity(cm.class_count());
    for k in 0..cm.class_count() {
        let tp = cm.counts[k][k] as f64;
        let col = cm.col_sum(k);
        let row = cm.row_sum(k);
        let precision = if col > 0 { tp / col as f64 } else { 0.0 };
        let recall = if row > 0 { tp / row as f64 } else { 0.0 };
        let f1 = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        per_class.push(ClassMetrics {
            class: cm.classes[k].clone(),
            precision,
            recall,
            f1,
            support: row,
            precision_undefined: col == 0,
            recall_undefined: row == 0,
        });
    }
    let weigh = |f: fn(&ClassMetrics) -> f64| {
        per_class.iter().map(|m| m.support as f64 * f(m)).sum::<f64>() / total as f64
    };
    Ok(EvaluationReport {
        accuracy: cm.trace() as f64 / total as f64,
        weighted_precision: weigh(|m| m.precision),
        weighted_recall: weigh(|m| m.recall),
        weighted_f1: weigh(|m| m.f1),
        total,
        per_class,
        matrix: cm.clone(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RenderFormat {
    Text,
    Json,
    Csv,
}

impl std::str::FromStr for RenderFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "text" => Ok(Self::Text),
            "json" => Ok(Self::Json),
            "csv" => Ok(Self::Csv),
            other => Err(format!("unknown report format '{other}'")),
        }
    }
}

/// Renders a report.
///
/// Text and CSV round metrics to four decimals; an asterisk (text) or a note
/// (CSV) marks undefined zero-denominator cells. JSON keeps full precision
/// and parses back to an equal report with [`report_from_json`].
pub fn render(rep: &EvaluationReport, format: RenderFormat) -> String {
    match format {
        RenderFormat::Json => {
            let mut s = serde_json::to_string_pretty(rep).expect("report serializes");
            s.push('\n');
            s
        }
        RenderFormat::Text => render_text(rep),
        RenderFormat::Csv => render_csv(rep),
    }
}

pub fn report_from_json(text: &str) -> Result<EvaluationReport, MetricsError> {
    serde_json::from_str(text).map_err(|e| MetricsError::BadDocument(e.to_string()))
}

fn cell(value: f64, undefined: bool) -> String {
    if undefined {
        format!("{value:.4}*")
    } else {
        format!("{value:.4}")
    }
}

fn render_text(rep: &EvaluationReport) -> String {
    let name_width = rep
        .per_class
        .iter()
        .map(|m| m.class.len())
        .chain(["Weighted avg".len()].into_iter())
        .max()
        .unwrap_or(8);
    let mut out = format!(
        "{:name_width$}  {:>10}  {:>10}  {:>10}  {:>8}\n",
        "Category", "Precision", "Recall", "F1-score", "Support"
    );
    let mut any_undefined = false;
    for m in &rep.per_class {
        any_undefined |= m.precision_undefined || m.recall_undefined;
        out.push_str(&format!(
            "{:name_width$}  {:>10}  {:>10}  {:>10}  {:>8}\n",
            m.class,
            cell(m.precision, m.precision_undefined),
            cell(m.recall, m.recall_undefined),
            format!("{:.4}", m.f1),
            m.support
        ));
    }
    out.push('\n');
    out.push_str(&format!(
        "{:name_width$}  {:>10}  {:>10}  {:>10}  {:>8}\n",
        "Accuracy",
        "",
        "",
        format!("{:.4}", rep.accuracy),
        rep.total
    ));
    out.push_str(&format!(
        "{:name_width$}  {:>10}  {:>10}  {:>10}  {:>8}\n",
        "Weighted avg",
        format!("{:.4}", rep.weighted_precision),
        format!("{:.4}", rep.weighted_recall),
        format!("{:.4}", rep.weighted_f1),
        rep.total
    ));
    if any_undefined {
        out.push_str("\n* undefined (zero denominator); reported as 0.\n");
    }
    out
}

fn render_csv(rep: &EvaluationReport) -> String {
    let mut out = String::from("class,precision,recall,f1,support,notes\n");
    for m in &rep.per_class {
        let mut notes = Vec::new();
        if m.precision_undefined {
            notes.push("precision undefined");
        }
        if m.recall_undefined {
            notes.push("recall undefined");
        }
        out.push_str(&format!(
            "{},{:.4},{:.4},{:.4},{},{}\n",
            m.class,
            m.precision,
            m.recall,
            m.f1,
            m.support,
            notes.join("; ")
        ));
    }
    out.push_str(&format!("accuracy,,,{:.4},{},\n", rep.accuracy, rep.total));
    out.push_str(&format!(
        "weighted avg,{:.4},{:.4},{:.4},{},\n",
        rep.weighted_precision, rep.weighted_recall, rep.weighted_f1, rep.total
    ));
    out
}
