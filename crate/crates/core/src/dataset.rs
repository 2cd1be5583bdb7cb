//! CBC record ingestion and the preprocessing steps of the training
//! pipeline: cleaning, IQR outlier removal, min-max normalization, random
//! oversampling, stratified splitting, and a synthetic record generator that
//! stands in for hospital data.
//!
//! CSV layout: `SampleID,WBC,HGB,HCT,PLT,Age,Sex,RefGroup` with an optional
//! trailing `Label` column holding the full class spelling. Unknown columns
//! are ignored. A numeric cell that is empty, unparseable, or out of
//! physical range (negative, or HCT above 100) marks the record incomplete;
//! incomplete records survive parsing and are dropped by [`clean`].

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::kb::{self, Bin, DiseaseClass, ParamSpec};
use crate::seeding::derive_seed;

#[derive(Debug, Error)]
pub enum DataError {
    #[error("missing required column '{0}'")]
    MissingColumn(String),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: unknown class label '{value}'")]
    BadLabel { line: u64, value: String },
    #[error("need at least {need} records, got {got}")]
    TooFew { need: usize, got: usize },
    #[error("dataset is empty")]
    Empty,
    #[error("record '{0}' is incomplete or unlabeled")]
    IncompleteRecord(String),
    #[error("test fraction must be inside (0, 1), got {0}")]
    BadFraction(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sex {
    M,
    F,
    Unknown,
}

impl Sex {
    fn parse(s: &str) -> Self {
        match s.trim() {
            "M" | "m" => Sex::M,
            "F" | "f" => Sex::F,
            _ => Sex::Unknown,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Sex::M => "M",
            Sex::F => "F",
            Sex::Unknown => "unknown",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RefGroup {
    AdultMale,
    AdultFemale,
    Child,
    Neonate,
    Unknown,
}

impl RefGroup {
    fn parse(s: &str) -> Self {
        match s.trim().to_ascii_lowercase().as_str() {
            "adult-male" => RefGroup::AdultMale,
            "adult-female" => RefGroup::AdultFemale,
            "child" => RefGroup::Child,
            "neonate" => RefGroup::Neonate,
            _ => RefGroup::Unknown,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            RefGroup::AdultMale => "adult-male",
            RefGroup::AdultFemale => "adult-female",
            RefGroup::Child => "child",
            RefGroup::Neonate => "neonate",
            RefGroup::Unknown => "unknown",
        }
    }
}

/// One blood-count observation. Core numerics are `None` when missing or
/// invalid; such records are incomplete and removed by [`clean`].
#[derive(Debug, Clone, PartialEq)]
pub struct CbcRecord {
    pub sample_id: String,
    pub wbc: Option<f64>,
    pub hgb: Option<f64>,
    pub hct: Option<f64>,
    pub plt: Option<f64>,
    pub age: Option<f64>,
    pub sex: Sex,
    pub ref_group: RefGroup,
    pub label: Option<DiseaseClass>,
}

impl CbcRecord {
    pub fn unlabeled(id: &str, wbc: f64, hgb: f64, hct: f64, plt: f64, age: f64) -> Self {
        Self {
            sample_id: id.to_string(),
            wbc: Some(wbc),
            hgb: Some(hgb),
            hct: Some(hct),
            plt: Some(plt),
            age: Some(age),
            sex: Sex::Unknown,
            ref_group: RefGroup::Unknown,
            label: None,
        }
    }

    /// All five core numerics present.
    pub fn is_complete(&self) -> bool {
        self.core_values().is_some()
    }

    /// `[wbc, hgb, hct, plt, age]` when complete.
    pub fn core_values(&self) -> Option<[f64; 5]> {
        Some([self.wbc?, self.hgb?, self.hct?, self.plt?, self.age?])
    }
}

pub const FEATURE_NAMES: [&str; 5] = ["WBC", "HGB", "HCT", "PLT", "Age"];

fn parse_cell(raw: &str, is_hct: bool) -> Option<f64> {
    let v: f64 = raw.trim().parse().ok()?;
    if !v.is_finite() || v < 0.0 || (is_hct && v > 100.0) {
        return None;
    }
    Some(v)
}

/// Reads records from CSV. The header row is mandatory and must contain the
/// eight standard columns; `Label` is optional and unknown columns are
/// skipped.
pub fn read_records_csv<R: Read>(reader: R) -> Result<Vec<CbcRecord>, DataError> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let col = |name: &str| -> Result<usize, DataError> {
        headers
            .iter()
            .position(|h| h.trim() == name)
            .ok_or_else(|| DataError::MissingColumn(name.to_string()))
    };
    let c_id = col("SampleID")?;
    let c_wbc = col("WBC")?;
    let c_hgb = col("HGB")?;
    let c_hct = col("HCT")?;
    let c_plt = col("PLT")?;
    let c_age = col("Age")?;
    let c_sex = col("Sex")?;
    let c_ref = col("RefGroup")?;
    let c_label = headers.iter().position(|h| h.trim() == "Label");

    let mut out = Vec::new();
    for row in rdr.records() {
        let row = row?;
        let line = row.position().map_or(0, |p| p.line());
        let cell = |i: usize| row.get(i).unwrap_or("");
        let label = match c_label {
            Some(i) => {
                let raw = cell(i).trim();
                if raw.is_empty() {
                    None
                } else {
                    Some(DiseaseClass::parse(raw).ok_or_else(|| DataError::BadLabel {
                        line,
                        value: raw.to_string(),
                    })?)
                }
            }
            None => None,
        };
        out.push(CbcRecord {
            sample_id: cell(c_id).trim().to_string(),
            wbc: parse_cell(cell(c_wbc), false),
            hgb: parse_cell(cell(c_hgb), false),
            hct: parse_cell(cell(c_hct), true),
            plt: parse_cell(cell(c_plt), false),
            age: parse_cell(cell(c_age), false),
            sex: Sex::parse(cell(c_sex)),
            ref_group: RefGroup::parse(cell(c_ref)),
            label,
        });
    }
    Ok(out)
}

pub fn load_csv(path: &Path) -> Result<Vec<CbcRecord>, DataError> {
    read_records_csv(File::open(path)?)
}

/// Writes records as CSV; a `Label` column is appended when `labeled`.
pub fn write_records_csv<W: Write>(
    writer: W,
    records: &[CbcRecord],
    labeled: bool,
) -> Result<(), DataError> {
    let mut wtr = csv::Writer::from_writer(writer);
    let mut header =
        vec!["SampleID", "WBC", "HGB", "HCT", "PLT", "Age", "Sex", "RefGroup"];
    if labeled {
        header.push("Label");
    }
    wtr.write_record(&header)?;
    let fmt = |v: Option<f64>| v.map_or(String::new(), |x| format_float(x));
    for r in records {
        let mut row = vec![
            r.sample_id.clone(),
            fmt(r.wbc),
            fmt(r.hgb),
            fmt(r.hct),
            fmt(r.plt),
            fmt(r.age),
            r.sex.as_str().to_string(),
            r.ref_group.as_str().to_string(),
        ];
        if labeled {
            row.push(r.label.map_or(String::new(), |l| l.canonical_name().to_string()));
        }
        wtr.write_record(&row)?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn save_csv(path: &Path, records: &[CbcRecord], labeled: bool) -> Result<(), DataError> {
    write_records_csv(File::create(path)?, records, labeled)
}

// Shortest representation that parses back to the same f64.
fn format_float(x: f64) -> String {
    let mut buf = ryu_format(x);
    if buf.ends_with(".0") {
        buf.truncate(buf.len() - 2);
    }
    buf
}

fn ryu_format(x: f64) -> String {
    // `{}` on f64 already produces the shortest round-trippable form.
    format!("{x}")
}

fn record_key(r: &CbcRecord) -> (String, [(bool, u64); 5], Sex, RefGroup, i8) {
    let bits = |v: Option<f64>| match v {
        Some(x) => (true, x.to_bits()),
        None => (false, 0),
    };
    (
        r.sample_id.clone(),
        [bits(r.wbc), bits(r.hgb), bits(r.hct), bits(r.plt), bits(r.age)],
        r.sex,
        r.ref_group,
        r.label.map_or(-1, |l| l.index() as i8),
    )
}

/// Drops incomplete records and exact duplicates (all fields equal; the
/// first occurrence survives). Order-preserving and idempotent.
pub fn clean(records: Vec<CbcRecord>) -> Vec<CbcRecord> {
    let mut seen = std::collections::HashSet::new();
    records
        .into_iter()
        .filter(|r| r.is_complete() && seen.insert(record_key(r)))
        .collect()
}

/// Linear interpolation between order statistics: for sorted `xs` of length
/// `n`, the quantile at `p` is `xs[i] + frac * (xs[i+1] - xs[i])` with
/// `i + frac = (n - 1) * p`.
pub fn quantile_type7(sorted: &[f64], p: f64) -> f64 {
    assert!(!sorted.is_empty() && (0.0..=1.0).contains(&p));
    let h = (sorted.len() - 1) as f64 * p;
    let i = h.floor() as usize;
    let frac = h - i as f64;
    if frac == 0.0 || i + 1 >= sorted.len() {
        sorted[i]
    } else {
        sorted[i] + frac * (sorted[i + 1] - sorted[i])
    }
}

/// Removes records with any core feature outside
/// `[Q1 - k*IQR, Q3 + k*IQR]`, computed per feature over the input. The
/// output is an order-preserving subset of the input. Expects cleaned
/// records: a missing feature never counts as an outlier.
pub fn iqr_filter(records: Vec<CbcRecord>, k: f64) -> Result<Vec<CbcRecord>, DataError> {
    if records.len() < 4 {
        return Err(DataError::TooFew { need: 4, got: records.len() });
    }
    let feature = |r: &CbcRecord, i: usize| -> Option<f64> {
        [r.wbc, r.hgb, r.hct, r.plt, r.age][i]
    };
    let mut bounds = Vec::with_capacity(5);
    for i in 0..5 {
        let mut values: Vec<f64> = records.iter().filter_map(|r| feature(r, i)).collect();
        if values.is_empty() {
            bounds.push(None);
            continue;
        }
        values.sort_by(f64::total_cmp);
        let q1 = quantile_type7(&values, 0.25);
        let q3 = quantile_type7(&values, 0.75);
        let iqr = q3 - q1;
        bounds.push(Some((q1 - k * iqr, q3 + k * iqr)));
    }
    Ok(records
        .into_iter()
        .filter(|r| {
            (0..5).all(|i| match (feature(r, i), bounds[i]) {
                (Some(x), Some((lo, hi))) => x >= lo && x <= hi,
                _ => true,
            })
        })
        .collect())
}

/// One training observation: the five features and a class label.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledSample {
    pub features: [f64; 5],
    pub label: DiseaseClass,
}

/// A feature matrix with labels, plus the min-max constants when the
/// features have been normalized (kept for applying the same mapping to
/// held-out data).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Dataset {
    pub samples: Vec<LabeledSample>,
    pub normalization: Option<Vec<(f64, f64)>>,
}

impl Dataset {
    /// Builds a dataset from complete, labeled records.
    pub fn from_records(records: &[CbcRecord]) -> Result<Self, DataError> {
        let mut samples = Vec::with_capacity(records.len());
        for r in records {
            let features = r
                .core_values()
                .ok_or_else(|| DataError::IncompleteRecord(r.sample_id.clone()))?;
            let label =
                r.label.ok_or_else(|| DataError::IncompleteRecord(r.sample_id.clone()))?;
            samples.push(LabeledSample { features, label });
        }
        Ok(Self { samples, normalization: None })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn labels(&self) -> Vec<DiseaseClass> {
        self.samples.iter().map(|s| s.label).collect()
    }

    pub fn class_counts(&self) -> BTreeMap<DiseaseClass, usize> {
        let mut counts = BTreeMap::new();
        for s in &self.samples {
            *counts.entry(s.label).or_insert(0) += 1;
        }
        counts
    }

    /// Fits per-feature `(min, max)` on this data and rescales each feature
    /// to `x' = (x - min) / (max - min)`. A zero-range feature maps to 0.
    pub fn normalize_minmax(&self) -> Dataset {
        let mut params = vec![(f64::INFINITY, f64::NEG_INFINITY); 5];
        for s in &self.samples {
            for (i, &x) in s.features.iter().enumerate() {
                params[i].0 = params[i].0.min(x);
                params[i].1 = params[i].1.max(x);
            }
        }
        let mut out = self.apply_normalization(&params);
        out.normalization = Some(params);
        out
    }

    /// Rescales with previously fitted constants (used on held-out data, so
    /// test rows never influence the fit). Values outside the fitted range
    /// map outside [0, 1]; the forest's thresholds don't mind.
    pub fn apply_normalization(&self, params: &[(f64, f64)]) -> Dataset {
        assert_eq!(params.len(), 5, "five feature ranges");
        let samples = self
            .samples
            .iter()
            .map(|s| {
                let mut f = s.features;
                for (i, x) in f.iter_mut().enumerate() {
                    let (lo, hi) = params[i];
                    *x = if hi > lo { (*x - lo) / (hi - lo) } else { 0.0 };
                }
                LabeledSample { features: f, label: s.label }
            })
            .collect();
        Dataset { samples, normalization: Some(params.to_vec()) }
    }

    /// Brings every class up to the majority-class count by sampling its own
    /// members uniformly with replacement. Originals are kept verbatim; an
    /// already balanced dataset comes back unchanged.
    pub fn oversample(&self, seed: u64) -> Result<Dataset, DataError> {
        if self.samples.is_empty() {
            return Err(DataError::Empty);
        }
        let mut by_class: BTreeMap<DiseaseClass, Vec<usize>> = BTreeMap::new();
        for (i, s) in self.samples.iter().enumerate() {
            by_class.entry(s.label).or_default().push(i);
        }
        let target = by_class.values().map(Vec::len).max().unwrap_or(0);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut samples = self.samples.clone();
        for members in by_class.values() {
            for _ in members.len()..target {
                let pick = members[rng.gen_range(0..members.len())];
                samples.push(self.samples[pick].clone());
            }
        }
        Ok(Dataset { samples, normalization: self.normalization.clone() })
    }

    /// Stratified split into `(train, test)`; see
    /// [`stratified_split_indices`] for the per-class arithmetic.
    pub fn split(&self, test_fraction: f64, seed: u64) -> Result<(Dataset, Dataset), DataError> {
        let (train_idx, test_idx) =
            stratified_split_indices(&self.labels(), test_fraction, seed)?;
        let take = |idx: &[usize]| Dataset {
            samples: idx.iter().map(|&i| self.samples[i].clone()).collect(),
            normalization: self.normalization.clone(),
        };
        Ok((take(&train_idx), take(&test_idx)))
    }
}

/// Stratified train/test indices. Per class, `round(count * test_fraction)`
/// samples go to test, capped at `count - 1` so every class keeps at least
/// one training sample; a single-sample class therefore goes entirely to
/// train. Both index lists come back in ascending order.
pub fn stratified_split_indices(
    labels: &[DiseaseClass],
    test_fraction: f64,
    seed: u64,
) -> Result<(Vec<usize>, Vec<usize>), DataError> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(DataError::BadFraction(test_fraction));
    }
    let mut by_class: BTreeMap<DiseaseClass, Vec<usize>> = BTreeMap::new();
    for (i, &l) in labels.iter().enumerate() {
        by_class.entry(l).or_default().push(i);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut train = Vec::new();
    let mut test = Vec::new();
    for members in by_class.values() {
        let mut shuffled = members.clone();
        use rand::seq::SliceRandom;
        shuffled.shuffle(&mut rng);
        let want = (members.len() as f64 * test_fraction).round() as usize;
        let n_test = want.min(members.len().saturating_sub(1));
        test.extend_from_slice(&shuffled[..n_test]);
        train.extend_from_slice(&shuffled[n_test..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}

/// How the synthetic generator places measurements relative to the
/// reference-range cut points.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GenMode {
    /// Deep inside the target bin, at least one band half-width away from
    /// every cut point. The crisp oracle classifies such records as the
    /// generating pattern's class with certainty.
    Core,
    /// Inside a transition band adjacent to the target bin, where rule
    /// activations stay at or below the boundary-midpoint strength.
    Boundary,
    /// 80% core records, 20% boundary records.
    Mixed,
}

impl std::str::FromStr for GenMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "core" => Ok(GenMode::Core),
            "boundary" => Ok(GenMode::Boundary),
            "mixed" => Ok(GenMode::Mixed),
            other => Err(format!("unknown generation mode '{other}'")),
        }
    }
}

fn sample_core_bin(rng: &mut ChaCha8Rng, spec: &ParamSpec, bin: Bin, delta: f64) -> f64 {
    let (lo, hi) = spec.interval(bin);
    // Shrink only at interior cut points; universe edges carry no band.
    let lo = if lo == spec.universe.0 { lo } else { lo + delta };
    let hi = if hi == spec.universe.1 { hi } else { hi - delta };
    rng.gen_range(lo..hi)
}

fn sample_boundary_bin(rng: &mut ChaCha8Rng, spec: &ParamSpec, bin: Bin, delta: f64) -> f64 {
    let cuts: &[f64] = match bin {
        Bin::Low => &[spec.boundaries.0],
        Bin::Normal => &[spec.boundaries.0, spec.boundaries.1],
        Bin::High => &[spec.boundaries.1],
    };
    let t = cuts[rng.gen_range(0..cuts.len())];
    rng.gen_range(t - delta..t + delta)
}

/// Generates `n_per_class` unlabeled records for each of the eleven expert
/// rule patterns ([`kb::RULE_PATTERNS`]), in pattern order. Parameters are
/// drawn uniformly from the pattern's target bins (an OR pattern picks one
/// alternative per record); age, sex and reference group are drawn
/// independently of the pattern since no rule consumes them. Labels are left
/// empty on purpose: labelling is the fuzzy engine's job.
pub fn generate_synthetic(n_per_class: usize, mode: GenMode, seed: u64) -> Vec<CbcRecord> {
    let mut out = Vec::with_capacity(n_per_class * kb::RULE_PATTERNS.len());
    for (pi, pattern) in kb::RULE_PATTERNS.iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, "gen", pi as u64));
        for i in 0..n_per_class {
            let near_boundary = match mode {
                GenMode::Core => false,
                GenMode::Boundary => true,
                GenMode::Mixed => rng.gen::<f64>() >= 0.8,
            };
            let mut values = [0.0f64; 4];
            for (j, (spec, allowed)) in
                kb::PARAMS.iter().zip(pattern.bins.iter()).enumerate()
            {
                let bin = allowed[rng.gen_range(0..allowed.len())];
                values[j] = if near_boundary {
                    sample_boundary_bin(&mut rng, spec, bin, spec.default_delta)
                } else {
                    sample_core_bin(&mut rng, spec, bin, spec.default_delta)
                };
            }
            let age = rng.gen_range(1.0..90.0);
            let sex = [Sex::M, Sex::F, Sex::Unknown][rng.gen_range(0..3)];
            let ref_group = [
                RefGroup::AdultMale,
                RefGroup::AdultFemale,
                RefGroup::Child,
                RefGroup::Neonate,
                RefGroup::Unknown,
            ][rng.gen_range(0..5)];
            out.push(CbcRecord {
                sample_id: format!("SYN-{pi:02}-{i:05}"),
                wbc: Some(values[0]),
                hgb: Some(values[1]),
                hct: Some(values[2]),
                plt: Some(values[3]),
                age: Some(age),
                sex,
                ref_group,
                label: None,
            });
        }
    }
    out
}
