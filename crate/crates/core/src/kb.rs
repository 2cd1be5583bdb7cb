//! The hematology knowledge base.
//!
//! Everything the expert contributed lives here: the crisp reference ranges
//! for WBC/HGB/HCT/PLT, the disease rules over low/normal/high bins, the
//! disease taxonomy with its canonical ordering, and the ambiguity policy
//! that maps weak rule activations to "No Disease Detected".
//!
//! Two classification routes are exposed on purpose. [`Labeler::label`] runs
//! the full fuzzy pipeline (fuzzify, fire, aggregate, defuzzify, threshold).
//! [`crisp_oracle`] bins each measurement crisply and pattern-matches the
//! same rules exactly; it exists as an independent oracle for testing the
//! fuzzy route and for validating synthetic data. Away from the transition
//! bands the two must agree.

use std::collections::BTreeMap;
use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::dataset::CbcRecord;
use crate::fuzzy::{FuzzyError, FuzzyVariable, MembershipFamily};
use crate::inference::{FuzzyRule, InferenceError, OutputVariable, RuleBase};

/// The fixed disease taxonomy. Indices are stable across runs and define the
/// canonical class order everywhere (datasets, forests, reports).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[repr(u8)]
pub enum DiseaseClass {
    IdaScaAbl = 0,
    Healthy = 1,
    NoDiseaseDetected = 2,
    SepUti = 3,
    ClcdAbl = 4,
    OvfItp = 5,
    Ovf = 6,
    Dengue = 7,
    Ckd = 8,
    Pancytopenia = 9,
    Polycythemia = 10,
    Septicemia = 11,
}

impl DiseaseClass {
    pub const ALL: [DiseaseClass; 12] = [
        DiseaseClass::IdaScaAbl,
        DiseaseClass::Healthy,
        DiseaseClass::NoDiseaseDetected,
        DiseaseClass::SepUti,
        DiseaseClass::ClcdAbl,
        DiseaseClass::OvfItp,
        DiseaseClass::Ovf,
        DiseaseClass::Dengue,
        DiseaseClass::Ckd,
        DiseaseClass::Pancytopenia,
        DiseaseClass::Polycythemia,
        DiseaseClass::Septicemia,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Self> {
        Self::ALL.get(i).copied()
    }

    /// The full clinical spelling, used in CSV `Label` columns.
    pub fn canonical_name(self) -> &'static str {
        match self {
            Self::IdaScaAbl => {
                "Iron Deficiency Anemia - IDA / Sickle Cell Anemia / Acute Blood Loss"
            }
            Self::Healthy => "Healthy",
            Self::NoDiseaseDetected => "No Disease Detected",
            Self::SepUti => "Septicemia / Urine Tract Infections - UTI",
            Self::ClcdAbl => "Chronic Liver Cell Disease - CLCD / Acute Blood Loss",
            Self::OvfItp => "Other Viral Fevers / Idiopathic Thrombocytopenic Purpura - ITP",
            Self::Ovf => "Other Viral Fevers",
            Self::Dengue => "Dengue",
            Self::Ckd => "Chronic Kidney Disease - CKD",
            Self::Pancytopenia => "Pancytopenia",
            Self::Polycythemia => "Polycythemia",
            Self::Septicemia => "Septicemia",
        }
    }

    /// The compact spelling used in report tables and confusion matrices.
    pub fn short_name(self) -> &'static str {
        match self {
            Self::IdaScaAbl => "IDA or SCA or ABL",
            Self::Healthy => "Healthy",
            Self::NoDiseaseDetected => "No Disease",
            Self::SepUti => "Sep or UTI",
            Self::ClcdAbl => "CLCD or ABL",
            Self::OvfItp => "OVF or ITP",
            Self::Ovf => "OVF",
            Self::Dengue => "Dengue",
            Self::Ckd => "CKD",
            Self::Pancytopenia => "Pan",
            Self::Polycythemia => "Pol",
            Self::Septicemia => "Sep",
        }
    }

    /// Parses either spelling, ignoring surrounding whitespace.
    pub fn parse(s: &str) -> Option<Self> {
        let s = s.trim();
        Self::ALL
            .iter()
            .copied()
            .find(|c| c.canonical_name() == s || c.short_name() == s)
    }
}

impl fmt::Display for DiseaseClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.canonical_name())
    }
}

impl Serialize for DiseaseClass {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.canonical_name())
    }
}

impl<'de> Deserialize<'de> for DiseaseClass {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        DiseaseClass::parse(&s)
            .ok_or_else(|| D::Error::custom(format!("unknown disease class '{s}'")))
    }
}

/// A crisp low/normal/high bin of one parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bin {
    Low,
    Normal,
    High,
}

impl Bin {
    pub fn label(self) -> &'static str {
        match self {
            Bin::Low => "low",
            Bin::Normal => "normal",
            Bin::High => "high",
        }
    }

    pub const ALL: [Bin; 3] = [Bin::Low, Bin::Normal, Bin::High];
}

/// Reference-range description of one CBC parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamSpec {
    pub name: &'static str,
    pub universe: (f64, f64),
    /// The low|normal and normal|high cut points.
    pub boundaries: (f64, f64),
    /// Default transition-band half-width, roughly 5-10% of the normal
    /// range's width.
    pub default_delta: f64,
}

impl ParamSpec {
    /// Crisp bin of `x`. A value exactly on a cut point belongs to the upper
    /// bin (the reference intervals share their endpoints, so a convention
    /// is required).
    pub fn bin(&self, x: f64) -> Bin {
        if x < self.boundaries.0 {
            Bin::Low
        } else if x < self.boundaries.1 {
            Bin::Normal
        } else {
            Bin::High
        }
    }

    /// The crisp interval `[lo, hi]` of a bin.
    pub fn interval(&self, bin: Bin) -> (f64, f64) {
        match bin {
            Bin::Low => (self.universe.0, self.boundaries.0),
            Bin::Normal => (self.boundaries.0, self.boundaries.1),
            Bin::High => (self.boundaries.1, self.universe.1),
        }
    }

    /// True when `x` lies at least `delta` away from both cut points, i.e.
    /// outside every transition band and inside the universe.
    pub fn in_core(&self, x: f64, delta: f64) -> bool {
        let (lo, hi) = self.universe;
        x >= lo
            && x <= hi
            && (x - self.boundaries.0).abs() >= delta
            && (x - self.boundaries.1).abs() >= delta
    }
}

/// The four CBC parameters in feature order: WBC, HGB, HCT, PLT.
pub const PARAMS: [ParamSpec; 4] = [
    ParamSpec {
        name: "WBC",
        universe: (0.0, 60.0),
        boundaries: (4.0, 10.0),
        default_delta: 0.5,
    },
    ParamSpec {
        name: "HGB",
        universe: (0.0, 50.0),
        boundaries: (12.0, 16.0),
        default_delta: 0.5,
    },
    ParamSpec {
        name: "HCT",
        universe: (0.0, 100.0),
        boundaries: (35.0, 54.0),
        default_delta: 2.0,
    },
    ParamSpec {
        name: "PLT",
        universe: (0.0, 1500.0),
        boundaries: (100.0, 450.0),
        default_delta: 25.0,
    },
];

pub fn param_spec(name: &str) -> Option<&'static ParamSpec> {
    PARAMS.iter().find(|p| p.name == name)
}

/// One expert rule at bin level: per parameter, the set of acceptable bins
/// (more than one bin means the alternatives are OR-ed), plus the class the
/// rule diagnoses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RulePattern {
    pub class: DiseaseClass,
    /// Acceptable bins for WBC, HGB, HCT, PLT, in that order.
    pub bins: [&'static [Bin]; 4],
}

const L: &[Bin] = &[Bin::Low];
const N: &[Bin] = &[Bin::Normal];
const H: &[Bin] = &[Bin::High];
const LN: &[Bin] = &[Bin::Low, Bin::Normal];

/// The eleven expert rule patterns, in their published order. The two
/// "Other Viral Fevers" conditions are distinct patterns: the WBC-low one
/// diagnoses `OvfItp`, the WBC-normal one `Ovf`. Dengue accepts WBC low or
/// normal within a single pattern.
pub const RULE_PATTERNS: [RulePattern; 11] = [
    RulePattern { class: DiseaseClass::SepUti, bins: [H, N, N, N] },
    RulePattern { class: DiseaseClass::Septicemia, bins: [H, N, N, H] },
    RulePattern { class: DiseaseClass::Dengue, bins: [LN, H, H, L] },
    RulePattern { class: DiseaseClass::OvfItp, bins: [L, N, N, L] },
    RulePattern { class: DiseaseClass::Ovf, bins: [N, N, N, L] },
    RulePattern { class: DiseaseClass::IdaScaAbl, bins: [N, L, L, N] },
    RulePattern { class: DiseaseClass::Polycythemia, bins: [N, H, H, N] },
    RulePattern { class: DiseaseClass::Pancytopenia, bins: [L, L, L, L] },
    RulePattern { class: DiseaseClass::Ckd, bins: [H, L, L, L] },
    RulePattern { class: DiseaseClass::ClcdAbl, bins: [N, L, L, L] },
    RulePattern { class: DiseaseClass::Healthy, bins: [N, N, N, N] },
];

/// Default ambiguity threshold: below it no rule reached even its
/// boundary-midpoint strength, so the verdict is "No Disease Detected".
pub const DEFAULT_TAU: f64 = 0.5;

/// The four built-in fuzzy variables with the default banded trapezoids.
pub fn builtin_variables() -> Vec<FuzzyVariable> {
    builtin_variables_with(MembershipFamily::Trapezoidal, &BTreeMap::new())
        .expect("builtin reference ranges are valid")
}

/// Built-in variables with a chosen membership family and per-variable band
/// half-width overrides (keyed by parameter name).
pub fn builtin_variables_with(
    family: MembershipFamily,
    delta_overrides: &BTreeMap<String, f64>,
) -> Result<Vec<FuzzyVariable>, FuzzyError> {
    PARAMS
        .iter()
        .map(|p| {
            let delta = delta_overrides.get(p.name).copied().unwrap_or(p.default_delta);
            FuzzyVariable::from_crisp_intervals(
                p.name,
                p.universe,
                &[p.boundaries.0, p.boundaries.1],
                &["low", "normal", "high"],
                delta,
                family,
            )
        })
        .collect()
}

/// The output axis over the full canonical taxonomy, so output term indices
/// coincide with [`DiseaseClass`] indices. `NoDiseaseDetected` owns a term
/// that no rule ever activates; the verdict is assigned by thresholding, not
/// by a rule.
fn builtin_output() -> OutputVariable {
    OutputVariable::new(
        DiseaseClass::ALL.iter().map(|c| c.canonical_name().to_string()).collect(),
    )
    .expect("canonical classes are distinct")
}

/// The built-in rule base: default variables plus [`RULE_PATTERNS`].
pub fn builtin_rule_base() -> RuleBase {
    builtin_rule_base_with(MembershipFamily::Trapezoidal, &BTreeMap::new())
        .expect("builtin knowledge base is valid")
}

pub fn builtin_rule_base_with(
    family: MembershipFamily,
    delta_overrides: &BTreeMap<String, f64>,
) -> Result<RuleBase, InferenceError> {
    let variables = builtin_variables_with(family, delta_overrides)?;
    let rules = RULE_PATTERNS
        .iter()
        .map(|p| {
            let antecedent = PARAMS
                .iter()
                .zip(p.bins.iter())
                .map(|(param, bins)| {
                    bins.iter()
                        .map(|b| (param.name.to_string(), b.label().to_string()))
                        .collect()
                })
                .collect();
            FuzzyRule::new(antecedent, p.class.canonical_name())
        })
        .collect();
    RuleBase::new(variables, rules, builtin_output())
}

/// Crisp classification: bin each parameter, then exact-match the rule
/// patterns. Returns `None` when no pattern matches. Independent of the
/// fuzzy machinery by construction.
pub fn crisp_oracle_values(wbc: f64, hgb: f64, hct: f64, plt: f64) -> Option<DiseaseClass> {
    let bins = [
        PARAMS[0].bin(wbc),
        PARAMS[1].bin(hgb),
        PARAMS[2].bin(hct),
        PARAMS[3].bin(plt),
    ];
    RULE_PATTERNS
        .iter()
        .find(|p| p.bins.iter().zip(bins.iter()).all(|(allowed, b)| allowed.contains(b)))
        .map(|p| p.class)
}

/// [`crisp_oracle_values`] over a record; `None` when measurements are
/// missing.
pub fn crisp_oracle(record: &CbcRecord) -> Option<DiseaseClass> {
    match (record.wbc, record.hgb, record.hct, record.plt) {
        (Some(w), Some(g), Some(c), Some(p)) => crisp_oracle_values(w, g, c, p),
        _ => None,
    }
}

/// True when all four measurements sit outside every transition band at the
/// given half-widths (defaults when `None`), i.e. the record is in a region
/// where the fuzzy and crisp routes must agree.
pub fn in_core_region(wbc: f64, hgb: f64, hct: f64, plt: f64, deltas: Option<[f64; 4]>) -> bool {
    let deltas = deltas.unwrap_or([
        PARAMS[0].default_delta,
        PARAMS[1].default_delta,
        PARAMS[2].default_delta,
        PARAMS[3].default_delta,
    ]);
    let values = [wbc, hgb, hct, plt];
    PARAMS
        .iter()
        .zip(values.iter())
        .zip(deltas.iter())
        .all(|((p, &x), &d)| p.in_core(x, d))
}

#[derive(Debug, Error)]
pub enum LabelError {
    #[error("record '{0}' is missing core measurements")]
    Incomplete(String),
    #[error(transparent)]
    Inference(#[from] InferenceError),
}

/// Verdict of the fuzzy labelling route for one record.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelResult {
    pub cls: DiseaseClass,
    /// Strongest rule activation; `cls` is `NoDiseaseDetected` iff this is
    /// below the threshold the label was produced with.
    pub max_activation: f64,
    /// Centroid of the aggregate output, when anything fired.
    pub centroid: Option<f64>,
    /// All activations in canonical class order.
    pub activations: Vec<(DiseaseClass, f64)>,
}

/// The fuzzy labelling engine: an immutable rule base plus the ambiguity
/// policy. Pure and safe to share across threads.
#[derive(Debug, Clone)]
pub struct Labeler {
    rule_base: RuleBase,
}

impl Default for Labeler {
    fn default() -> Self {
        Self { rule_base: builtin_rule_base() }
    }
}

impl Labeler {
    /// Wraps a custom rule base. Its output classes must all belong to the
    /// canonical taxonomy so verdicts can be expressed as [`DiseaseClass`].
    pub fn new(rule_base: RuleBase) -> Result<Self, InferenceError> {
        for class in rule_base.output().classes() {
            if DiseaseClass::parse(class).is_none() {
                return Err(InferenceError::BadOutput(format!(
                    "output class '{class}' is not in the disease taxonomy"
                )));
            }
        }
        Ok(Self { rule_base })
    }

    pub fn rule_base(&self) -> &RuleBase {
        &self.rule_base
    }

    /// Labels raw measurements: runs inference, then applies the ambiguity
    /// threshold `tau`. The strongest class wins when its activation reaches
    /// `tau`; otherwise the verdict is `NoDiseaseDetected` with the
    /// activations preserved for inspection.
    pub fn label_values(
        &self,
        wbc: f64,
        hgb: f64,
        hct: f64,
        plt: f64,
        tau: f64,
    ) -> Result<LabelResult, LabelError> {
        let crisp: BTreeMap<String, f64> = [
            ("WBC".to_string(), wbc),
            ("HGB".to_string(), hgb),
            ("HCT".to_string(), hct),
            ("PLT".to_string(), plt),
        ]
        .into();
        let result = self.rule_base.infer(&crisp)?;
        let mut activations = Vec::with_capacity(result.classes.len());
        for (name, &a) in result.classes.iter().zip(result.activations.iter()) {
            let cls = DiseaseClass::parse(name).expect("output classes validated");
            activations.push((cls, a));
        }
        activations.sort_by_key(|(c, _)| c.index());
        let cls = match result.argmax() {
            Some((idx, act)) if act >= tau => {
                DiseaseClass::parse(&result.classes[idx]).expect("output classes validated")
            }
            _ => DiseaseClass::NoDiseaseDetected,
        };
        let max_activation = result.argmax().map_or(0.0, |(_, a)| a);
        Ok(LabelResult { cls, max_activation, centroid: result.centroid, activations })
    }

    pub fn label(&self, record: &CbcRecord, tau: f64) -> Result<LabelResult, LabelError> {
        match (record.wbc, record.hgb, record.hct, record.plt) {
            (Some(w), Some(g), Some(c), Some(p)) => self.label_values(w, g, c, p, tau),
            _ => Err(LabelError::Incomplete(record.sample_id.clone())),
        }
    }
}

/// JSON export of the built-in variable definitions, editable and reloadable
/// without recompiling.
pub fn builtin_variables_json() -> String {
    crate::fuzzy::variables_to_json(&builtin_variables())
}

/// JSON export of the built-in rules.
pub fn builtin_rules_json() -> String {
    builtin_rule_base().to_json()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn taxonomy_indices_are_stable() {
        for (i, c) in DiseaseClass::ALL.iter().enumerate() {
            assert_eq!(c.index(), i);
            assert_eq!(DiseaseClass::from_index(i), Some(*c));
            assert_eq!(DiseaseClass::parse(c.canonical_name()), Some(*c));
            assert_eq!(DiseaseClass::parse(c.short_name()), Some(*c));
        }
        assert_eq!(DiseaseClass::Septicemia.index(), 11);
        assert_eq!(DiseaseClass::parse("nonsense"), None);
    }

    #[test]
    fn builtin_variables_match_reference_ranges() {
        let vars = builtin_variables();
        assert_eq!(vars.len(), 4);
        for v in &vars {
            let labels: Vec<_> = v.terms().iter().map(|t| t.label.as_str()).collect();
            assert_eq!(labels, ["low", "normal", "high"]);
        }
        let plt = vars.iter().find(|v| v.name() == "PLT").unwrap();
        assert_eq!(plt.term("high").unwrap().mf.support(), Some((425.0, 1500.0)));
        assert_eq!(plt.universe(), (0.0, 1500.0));
        let hgb = vars.iter().find(|v| v.name() == "HGB").unwrap();
        // The normal core [12.5, 15.5] sits inside the reference interval.
        if let crate::fuzzy::MembershipFunction::Trapezoidal { b, c, .. } =
            hgb.term("normal").unwrap().mf
        {
            assert!(b >= 12.0 && c <= 16.0);
        } else {
            panic!("default construction is trapezoidal");
        }
    }

    #[test]
    fn builtin_rules_cover_the_published_patterns() {
        let rb = builtin_rule_base();
        assert_eq!(rb.rules().len(), 11);
        let sep_uti = rb
            .rules()
            .iter()
            .find(|r| r.consequent == DiseaseClass::SepUti.canonical_name())
            .unwrap();
        let to_pairs = |r: &FuzzyRule| -> Vec<Vec<(String, String)>> { r.antecedent.clone() };
        assert_eq!(
            to_pairs(sep_uti),
            vec![
                vec![("WBC".to_string(), "high".to_string())],
                vec![("HGB".to_string(), "normal".to_string())],
                vec![("HCT".to_string(), "normal".to_string())],
                vec![("PLT".to_string(), "normal".to_string())],
            ]
        );
        let dengue = rb
            .rules()
            .iter()
            .find(|r| r.consequent == DiseaseClass::Dengue.canonical_name())
            .unwrap();
        assert_eq!(
            dengue.antecedent[0],
            vec![
                ("WBC".to_string(), "low".to_string()),
                ("WBC".to_string(), "normal".to_string()),
            ]
        );
    }

    #[test]
    fn label_core_healthy() {
        let labeler = Labeler::default();
        let res = labeler.label_values(7.0, 14.0, 45.0, 250.0, 0.5).unwrap();
        assert_eq!(res.cls, DiseaseClass::Healthy);
        assert_eq!(res.max_activation, 1.0);
        // Healthy is class 1: its output term is centred at 1.5.
        assert!((res.centroid.unwrap() - 1.5).abs() < 1e-9);
        for (c, a) in &res.activations {
            if *c != DiseaseClass::Healthy {
                assert_eq!(*a, 0.0, "{c:?} unexpectedly fired");
            }
        }
    }

    #[test]
    fn label_ckd_pattern() {
        let labeler = Labeler::default();
        let res = labeler.label_values(15.0, 8.0, 25.0, 60.0, 0.5).unwrap();
        assert_eq!(res.cls, DiseaseClass::Ckd);
        assert_eq!(crisp_oracle_values(15.0, 8.0, 25.0, 60.0), Some(DiseaseClass::Ckd));
    }

    #[test]
    fn label_unmatched_pattern_is_no_disease() {
        let labeler = Labeler::default();
        // WBC exactly on a boundary, everything else high: no pattern fits.
        let res = labeler.label_values(4.0, 20.0, 90.0, 800.0, 0.5).unwrap();
        assert_eq!(res.cls, DiseaseClass::NoDiseaseDetected);
        assert!(res.max_activation < 0.5);
        assert_eq!(crisp_oracle_values(4.0, 20.0, 90.0, 800.0), None);
    }

    #[test]
    fn label_rejects_incomplete_records() {
        let labeler = Labeler::default();
        let mut rec = CbcRecord::unlabeled("S1", 7.0, 14.0, 45.0, 250.0, 30.0);
        rec.hgb = None;
        assert!(matches!(labeler.label(&rec, 0.5), Err(LabelError::Incomplete(_))));
    }

    #[test]
    fn oracle_examples() {
        assert_eq!(crisp_oracle_values(7.0, 14.0, 45.0, 250.0), Some(DiseaseClass::Healthy));
        assert_eq!(crisp_oracle_values(2.0, 8.0, 20.0, 50.0), Some(DiseaseClass::Pancytopenia));
        assert_eq!(crisp_oracle_values(15.0, 20.0, 90.0, 800.0), None);
    }

    #[test]
    fn oracle_boundary_belongs_to_upper_bin() {
        assert_eq!(PARAMS[0].bin(4.0), Bin::Normal);
        assert_eq!(PARAMS[0].bin(10.0), Bin::High);
        assert_eq!(PARAMS[0].bin(3.999), Bin::Low);
    }

    /// Every (low/normal/high)^4 bin assignment the oracle maps to a class.
    fn enumerate_bin_patterns() -> Vec<([Bin; 4], Option<DiseaseClass>)> {
        let mut out = Vec::with_capacity(81);
        for &a in &Bin::ALL {
            for &b in &Bin::ALL {
                for &c in &Bin::ALL {
                    for &d in &Bin::ALL {
                        let bins = [a, b, c, d];
                        let hit = RULE_PATTERNS
                            .iter()
                            .find(|p| {
                                p.bins
                                    .iter()
                                    .zip(bins.iter())
                                    .all(|(allowed, bin)| allowed.contains(bin))
                            })
                            .map(|p| p.class);
                        out.push((bins, hit));
                    }
                }
            }
        }
        out
    }

    #[test]
    fn bin_pattern_footprint_is_exact() {
        // The eleven rules expand to twelve bin patterns (Dengue's OR covers
        // two), eleven of them diseases plus Healthy; the other 69 of the 81
        // assignments match nothing.
        let table = enumerate_bin_patterns();
        assert_eq!(table.len(), 81);
        let some: Vec<_> = table.iter().filter_map(|(_, c)| *c).collect();
        assert_eq!(some.len(), 12);
        assert_eq!(table.iter().filter(|(_, c)| c.is_none()).count(), 69);
        let dengue = some.iter().filter(|&&c| c == DiseaseClass::Dengue).count();
        assert_eq!(dengue, 2);
        let mut distinct: Vec<_> = some.clone();
        distinct.sort();
        distinct.dedup();
        // Ten distinct disease classes plus Healthy are reachable.
        assert_eq!(distinct.len(), 11);
        assert!(distinct.contains(&DiseaseClass::Healthy));
        assert!(distinct.contains(&DiseaseClass::OvfItp));
        assert!(distinct.contains(&DiseaseClass::Ovf));
        assert!(!distinct.contains(&DiseaseClass::NoDiseaseDetected));
    }

    /// Samples a value in the core of a bin (outside all transition bands).
    fn sample_core(rng: &mut ChaCha8Rng, spec: &ParamSpec, bin: Bin) -> f64 {
        let (lo, hi) = spec.interval(bin);
        let lo = if lo == spec.universe.0 { lo } else { lo + spec.default_delta };
        let hi = if hi == spec.universe.1 { hi } else { hi - spec.default_delta };
        rng.gen_range(lo..hi)
    }

    #[test]
    fn fuzzy_and_crisp_routes_agree_outside_bands() {
        let labeler = Labeler::default();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut checked = 0usize;
        for _ in 0..10_000 {
            let bins: [Bin; 4] =
                std::array::from_fn(|_| Bin::ALL[rng.gen_range(0..3usize)]);
            let values: [f64; 4] =
                std::array::from_fn(|i| sample_core(&mut rng, &PARAMS[i], bins[i]));
            assert!(in_core_region(values[0], values[1], values[2], values[3], None));
            let fuzzy = labeler
                .label_values(values[0], values[1], values[2], values[3], DEFAULT_TAU)
                .unwrap();
            let crisp = crisp_oracle_values(values[0], values[1], values[2], values[3])
                .unwrap_or(DiseaseClass::NoDiseaseDetected);
            assert_eq!(fuzzy.cls, crisp, "disagreement at {values:?} (bins {bins:?})");
            checked += 1;
        }
        assert_eq!(checked, 10_000);
    }

    #[test]
    fn raising_tau_never_revives_a_disease() {
        let labeler = Labeler::default();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..500 {
            let w = rng.gen_range(0.0..20.0);
            let g = rng.gen_range(0.0..25.0);
            let c = rng.gen_range(0.0..100.0);
            let p = rng.gen_range(0.0..800.0);
            let lo = labeler.label_values(w, g, c, p, 0.3).unwrap();
            let hi = labeler.label_values(w, g, c, p, 0.7).unwrap();
            if lo.cls == DiseaseClass::NoDiseaseDetected {
                assert_eq!(hi.cls, DiseaseClass::NoDiseaseDetected);
            }
        }
    }

    #[test]
    fn custom_rule_base_with_foreign_class_is_rejected() {
        let vars = builtin_variables();
        let rules = vec![FuzzyRule::new(
            vec![vec![("WBC".to_string(), "low".to_string())]],
            "Martian Flu",
        )];
        let output = OutputVariable::new(vec!["Martian Flu".to_string()]).unwrap();
        let rb = RuleBase::new(vars, rules, output).unwrap();
        assert!(Labeler::new(rb).is_err());
    }

    #[test]
    fn builtin_json_exports_reload() {
        let vars = crate::fuzzy::variables_from_json(&builtin_variables_json()).unwrap();
        assert_eq!(vars, builtin_variables());
        let rb = RuleBase::from_json(&builtin_rules_json(), vars).unwrap();
        assert_eq!(&rb, Labeler::default().rule_base());
    }
}
