//! Rule representation, Mamdani inference, and centroid defuzzification.
//!
//! Operator choices are the classical Mamdani configuration: AND is minimum,
//! OR is maximum, implication clips each output term at its rule's firing
//! strength, and aggregation takes the pointwise maximum of the clipped
//! terms. The aggregate curve is sampled on a uniform grid and collapsed to
//! a crisp value with composite trapezoidal quadrature.
//!
//! The output axis places one unit-width triangular term per class: term `k`
//! peaks at `k + 0.5` with support `[k, k + 1]`, so when a single class
//! dominates, `floor(centroid)` recovers its index. The predicted class is
//! nevertheless decided by argmax of the activations: a centroid over
//! disjoint peaks of a nominal axis lands between them and means nothing, so
//! it is computed and reported but never used as the decoder.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fuzzy::{FuzzyError, FuzzyVariable, MembershipFunction};

/// Samples per unit interval of the class axis for the aggregate curve.
pub const DEFAULT_RESOLUTION: usize = 1000;

#[derive(Debug, Error)]
pub enum InferenceError {
    #[error("rule base has no rules")]
    EmptyRuleBase,
    #[error("rule {rule}: antecedent has no clause groups")]
    EmptyAntecedent { rule: usize },
    #[error("rule {rule}: clause group {group} is empty")]
    EmptyGroup { rule: usize, group: usize },
    #[error("rule {rule}: unknown variable '{variable}'")]
    UnknownVariable { rule: usize, variable: String },
    #[error("rule {rule}: variable '{variable}' has no term '{term}'")]
    UnknownTerm { rule: usize, variable: String, term: String },
    #[error("rule {rule}: consequent '{consequent}' is not an output class")]
    UnknownConsequent { rule: usize, consequent: String },
    #[error("input is missing variable '{0}'")]
    MissingVariable(String),
    #[error("no rule fired: aggregate curve is empty")]
    NoFire,
    #[error("output variable: {0}")]
    BadOutput(String),
    #[error("bad rule document: {0}")]
    BadDocument(String),
    #[error(transparent)]
    Fuzzy(#[from] FuzzyError),
}

/// Fuzzified inputs: variable name -> term label -> degree.
pub type Fuzzified = BTreeMap<String, BTreeMap<String, f64>>;

/// One IF-THEN rule: a conjunction of clause groups mapped to an output class.
///
/// Each group is a nonempty set of `(variable, term)` alternatives joined by
/// OR; the groups themselves are joined by AND.
#[derive(Debug, Clone, PartialEq)]
pub struct FuzzyRule {
    pub antecedent: Vec<Vec<(String, String)>>,
    pub consequent: String,
}

impl FuzzyRule {
    pub fn new(antecedent: Vec<Vec<(String, String)>>, consequent: impl Into<String>) -> Self {
        Self { antecedent, consequent: consequent.into() }
    }
}

/// The class axis: one unit-width triangular term per output class.
#[derive(Debug, Clone, PartialEq)]
pub struct OutputVariable {
    classes: Vec<String>,
}

impl OutputVariable {
    pub fn new(classes: Vec<String>) -> Result<Self, InferenceError> {
        if classes.is_empty() {
            return Err(InferenceError::BadOutput("no output classes".into()));
        }
        let mut seen = std::collections::BTreeSet::new();
        for c in &classes {
            if !seen.insert(c.as_str()) {
                return Err(InferenceError::BadOutput(format!("duplicate class '{c}'")));
            }
        }
        Ok(Self { classes })
    }

    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.classes.iter().position(|c| c == label)
    }

    /// The output term for class `k`: triangular on `[k, k + 1]`, peak at
    /// `k + 0.5`.
    pub fn term(&self, k: usize) -> MembershipFunction {
        let a = k as f64;
        MembershipFunction::Triangular { a, b: a + 0.5, c: a + 1.0 }
    }

    /// Samples `max_k min(activations[k], term_k(x))` on a uniform grid over
    /// `[0, class_count]` with `per_unit` samples per unit interval.
    pub fn sample_aggregate(&self, activations: &[f64], per_unit: usize) -> SampledCurve {
        assert_eq!(activations.len(), self.classes.len(), "one activation per class");
        assert!(per_unit > 0, "resolution must be positive");
        let units = self.classes.len();
        let mut values = vec![0.0; units * per_unit + 1];
        for (k, &act) in activations.iter().enumerate() {
            if act <= 0.0 {
                continue;
            }
            let term = self.term(k);
            // term k is zero outside [k, k + 1]; only that window can change.
            let start = k * per_unit;
            for i in 0..=per_unit {
                let idx = start + i;
                let x = idx as f64 / per_unit as f64;
                let mu = term.evaluate(x).min(act);
                if mu > values[idx] {
                    values[idx] = mu;
                }
            }
        }
        SampledCurve { per_unit, values }
    }
}

/// A membership curve sampled on a uniform grid over `[0, units]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledCurve {
    per_unit: usize,
    values: Vec<f64>,
}

impl SampledCurve {
    /// Wraps raw samples; `values` must hold `units * per_unit + 1` points.
    pub fn from_values(per_unit: usize, values: Vec<f64>) -> Self {
        assert!(per_unit > 0 && (values.len() - 1) % per_unit == 0, "grid must align to units");
        Self { per_unit, values }
    }

    /// The empty curve of a no-fire result.
    pub fn empty() -> Self {
        Self { per_unit: DEFAULT_RESOLUTION, values: Vec::new() }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn x_at(&self, i: usize) -> f64 {
        i as f64 / self.per_unit as f64
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Centroid of a sampled membership curve by composite trapezoidal
/// quadrature: `∫ x μ(x) dx / ∫ μ(x) dx` on the curve's uniform grid.
///
/// Fails with [`InferenceError::NoFire`] when the curve has no strictly
/// positive sample.
pub fn defuzzify_centroid(curve: &SampledCurve) -> Result<f64, InferenceError> {
    let n = curve.values.len();
    if n < 2 {
        return Err(InferenceError::NoFire);
    }
    let mut num = 0.0;
    let mut den = 0.0;
    for (i, &mu) in curve.values.iter().enumerate() {
        let w = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
        let x = curve.x_at(i);
        num += w * x * mu;
        den += w * mu;
    }
    // The grid step cancels in the ratio.
    if den <= 0.0 {
        return Err(InferenceError::NoFire);
    }
    Ok(num / den)
}

/// Firing strength of one rule against fuzzified inputs:
/// `min` over clause groups of (`max` over the group's clauses).
pub fn fire_rule(rule: &FuzzyRule, fuzzified: &Fuzzified) -> Result<f64, InferenceError> {
    let mut strength = 1.0f64;
    for group in &rule.antecedent {
        let mut best = 0.0f64;
        for (variable, term) in group {
            let degrees = fuzzified
                .get(variable)
                .ok_or_else(|| InferenceError::MissingVariable(variable.clone()))?;
            let degree = degrees.get(term).ok_or_else(|| InferenceError::UnknownTerm {
                rule: 0,
                variable: variable.clone(),
                term: term.clone(),
            })?;
            best = best.max(*degree);
        }
        strength = strength.min(best);
    }
    Ok(strength)
}

/// Per-class outcome of one inference run.
///
/// `activations[k]` is the maximum firing strength across the rules whose
/// consequent is `classes[k]`. The aggregate curve is empty and the centroid
/// absent when nothing fired.
#[derive(Debug, Clone, PartialEq)]
pub struct InferenceResult {
    pub classes: Vec<String>,
    pub activations: Vec<f64>,
    pub centroid: Option<f64>,
    pub aggregate: SampledCurve,
}

impl InferenceResult {
    pub fn fired(&self) -> bool {
        self.activations.iter().any(|&a| a > 0.0)
    }

    /// Index and strength of the strongest activation; ties resolve to the
    /// lowest class index. `None` when nothing fired.
    pub fn argmax(&self) -> Option<(usize, f64)> {
        if !self.fired() {
            return None;
        }
        let mut best = 0usize;
        for (i, &a) in self.activations.iter().enumerate() {
            if a > self.activations[best] {
                best = i;
            }
        }
        Some((best, self.activations[best]))
    }

    pub fn activation_of(&self, class: &str) -> Option<f64> {
        self.classes.iter().position(|c| c == class).map(|i| self.activations[i])
    }
}

/// An immutable, validated set of rules over a variable registry.
#[derive(Debug, Clone, PartialEq)]
pub struct RuleBase {
    variables: BTreeMap<String, FuzzyVariable>,
    rules: Vec<FuzzyRule>,
    output: OutputVariable,
}

impl RuleBase {
    /// Builds a rule base, rejecting dangling references up front so firing
    /// can never hit an unknown variable or term.
    pub fn new(
        variables: Vec<FuzzyVariable>,
        rules: Vec<FuzzyRule>,
        output: OutputVariable,
    ) -> Result<Self, InferenceError> {
        if rules.is_empty() {
            return Err(InferenceError::EmptyRuleBase);
        }
        let registry: BTreeMap<String, FuzzyVariable> =
            variables.into_iter().map(|v| (v.name().to_string(), v)).collect();
        for (ri, rule) in rules.iter().enumerate() {
            if rule.antecedent.is_empty() {
                return Err(InferenceError::EmptyAntecedent { rule: ri });
            }
            for (gi, group) in rule.antecedent.iter().enumerate() {
                if group.is_empty() {
                    return Err(InferenceError::EmptyGroup { rule: ri, group: gi });
                }
                for (variable, term) in group {
                    let var = registry.get(variable).ok_or_else(|| {
                        InferenceError::UnknownVariable { rule: ri, variable: variable.clone() }
                    })?;
                    if var.term(term).is_none() {
                        return Err(InferenceError::UnknownTerm {
                            rule: ri,
                            variable: variable.clone(),
                            term: term.clone(),
                        });
                    }
                }
            }
            if output.index_of(&rule.consequent).is_none() {
                return Err(InferenceError::UnknownConsequent {
                    rule: ri,
                    consequent: rule.consequent.clone(),
                });
            }
        }
        Ok(Self { variables: registry, rules, output })
    }

    pub fn variables(&self) -> &BTreeMap<String, FuzzyVariable> {
        &self.variables
    }

    pub fn rules(&self) -> &[FuzzyRule] {
        &self.rules
    }

    pub fn output(&self) -> &OutputVariable {
        &self.output
    }

    /// Fuzzifies the crisp inputs, fires every rule, aggregates, and
    /// defuzzifies. Purely functional: identical inputs produce bit-identical
    /// results.
    pub fn infer(&self, crisp: &BTreeMap<String, f64>) -> Result<InferenceResult, InferenceError> {
        for rule in &self.rules {
            for group in &rule.antecedent {
                for (variable, _) in group {
                    if !crisp.contains_key(variable) {
                        return Err(InferenceError::MissingVariable(variable.clone()));
                    }
                }
            }
        }
        let mut fuzzified = Fuzzified::new();
        for (name, var) in &self.variables {
            if let Some(&x) = crisp.get(name) {
                fuzzified.insert(name.clone(), var.fuzzify(x)?);
            }
        }
        let mut activations = vec![0.0f64; self.output.class_count()];
        for rule in &self.rules {
            let strength = fire_rule(rule, &fuzzified)?;
            let k = self
                .output
                .index_of(&rule.consequent)
                .expect("consequents validated at construction");
            if strength > activations[k] {
                activations[k] = strength;
            }
        }
        let fired = activations.iter().any(|&a| a > 0.0);
        let (aggregate, centroid) = if fired {
            let curve = self.output.sample_aggregate(&activations, DEFAULT_RESOLUTION);
            let c = defuzzify_centroid(&curve)?;
            (curve, Some(c))
        } else {
            (SampledCurve::empty(), None)
        };
        Ok(InferenceResult {
            classes: self.output.classes().to_vec(),
            activations,
            centroid,
            aggregate,
        })
    }

    /// Renders the rules as the JSON document accepted by
    /// [`RuleBase::from_json`].
    pub fn to_json(&self) -> String {
        let doc = RuleBaseDoc {
            classes: self.output.classes().to_vec(),
            rules: self
                .rules
                .iter()
                .map(|r| RuleDoc {
                    antecedent: r.antecedent.clone(),
                    consequent: r.consequent.clone(),
                })
                .collect(),
        };
        let mut s = serde_json::to_string_pretty(&doc).expect("rule docs serialize");
        s.push('\n');
        s
    }

    /// Parses a rule document and validates it against `variables`.
    ///
    /// When the document omits `classes`, the output axis is derived from the
    /// consequents in order of first appearance.
    pub fn from_json(text: &str, variables: Vec<FuzzyVariable>) -> Result<Self, InferenceError> {
        let doc: RuleBaseDoc =
            serde_json::from_str(text).map_err(|e| InferenceError::BadDocument(e.to_string()))?;
        let classes = if doc.classes.is_empty() {
            let mut seen = Vec::new();
            for r in &doc.rules {
                if !seen.contains(&r.consequent) {
                    seen.push(r.consequent.clone());
                }
            }
            seen
        } else {
            doc.classes
        };
        let rules = doc
            .rules
            .into_iter()
            .map(|r| FuzzyRule::new(r.antecedent, r.consequent))
            .collect();
        Self::new(variables, rules, OutputVariable::new(classes)?)
    }
}

// Document format:
// {
//   "classes": ["Healthy", ...],                       // optional
//   "rules": [
//     { "if": [[["WBC", "high"]], [["HGB", "normal"]]], "then": "..." },
//     ...
//   ]
// }
// The nested arrays under "if" encode the AND-of-OR antecedent structure.
#[derive(Serialize, Deserialize)]
struct RuleDoc {
    #[serde(rename = "if")]
    antecedent: Vec<Vec<(String, String)>>,
    #[serde(rename = "then")]
    consequent: String,
}

#[derive(Serialize, Deserialize)]
struct RuleBaseDoc {
    #[serde(default)]
    classes: Vec<String>,
    rules: Vec<RuleDoc>,
}
