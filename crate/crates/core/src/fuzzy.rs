//! Membership functions, linguistic terms, and fuzzy variables.
//!
//! A [`FuzzyVariable`] is a named measurement axis with a closed universe of
//! discourse and an ordered family of labelled membership functions (its
//! linguistic terms, e.g. `low` / `normal` / `high`). Crisp measurements are
//! turned into per-term degrees with [`FuzzyVariable::fuzzify`].
//!
//! Variables are usually built from crisp reference intervals with
//! [`FuzzyVariable::from_crisp_intervals`]: each crisp boundary becomes a
//! transition band of half-width `delta` in which the two adjacent terms ramp
//! linearly and complementarily (their degrees sum to 1), while the outermost
//! terms are shouldered so the whole universe stays covered.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FuzzyError {
    #[error("invalid membership function: {0}")]
    InvalidShape(String),
    #[error("variable '{0}': {1}")]
    InvalidVariable(String, String),
    #[error("variable '{0}': input value is not finite")]
    NonFiniteInput(String),
    #[error("bad variable document: {0}")]
    BadDocument(String),
}

/// A parametric membership curve mapping a measurement to a degree in [0, 1].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MembershipFunction {
    /// Ramp up on `[a, b]`, peak 1 at `b`, ramp down on `[b, c]`.
    Triangular { a: f64, b: f64, c: f64 },
    /// Ramp up on `[a, b]`, plateau 1 on `[b, c]`, ramp down on `[c, d]`.
    Trapezoidal { a: f64, b: f64, c: f64, d: f64 },
    /// `exp(-(x - center)^2 / (2 sigma^2))`, peak 1 at `center`.
    Gaussian { center: f64, sigma: f64 },
}

impl MembershipFunction {
    pub fn triangular(a: f64, b: f64, c: f64) -> Result<Self, FuzzyError> {
        if !(a.is_finite() && b.is_finite() && c.is_finite()) || !(a <= b && b <= c) {
            return Err(FuzzyError::InvalidShape(format!(
                "triangular requires finite a <= b <= c, got ({a}, {b}, {c})"
            )));
        }
        Ok(Self::Triangular { a, b, c })
    }

    pub fn trapezoidal(a: f64, b: f64, c: f64, d: f64) -> Result<Self, FuzzyError> {
        if !(a.is_finite() && b.is_finite() && c.is_finite() && d.is_finite())
            || !(a <= b && b <= c && c <= d)
        {
            return Err(FuzzyError::InvalidShape(format!(
                "trapezoidal requires finite a <= b <= c <= d, got ({a}, {b}, {c}, {d})"
            )));
        }
        Ok(Self::Trapezoidal { a, b, c, d })
    }

    pub fn gaussian(center: f64, sigma: f64) -> Result<Self, FuzzyError> {
        if !center.is_finite() || !sigma.is_finite() || sigma <= 0.0 {
            return Err(FuzzyError::InvalidShape(format!(
                "gaussian requires finite center and sigma > 0, got ({center}, {sigma})"
            )));
        }
        Ok(Self::Gaussian { center, sigma })
    }

    /// Membership degree at `x`, always in [0, 1].
    ///
    /// Non-finite inputs evaluate to 0; callers that must reject them do so
    /// before evaluation (see [`FuzzyVariable::fuzzify`]).
    pub fn evaluate(&self, x: f64) -> f64 {
        if x.is_nan() {
            return 0.0;
        }
        let mu = match *self {
            Self::Triangular { a, b, c } => {
                if x < a || x > c {
                    0.0
                } else if x == b {
                    1.0
                } else if x < b {
                    (x - a) / (b - a)
                } else {
                    (c - x) / (c - b)
                }
            }
            Self::Trapezoidal { a, b, c, d } => {
                if x < a || x > d {
                    0.0
                } else if x >= b && x <= c {
                    1.0
                } else if x < b {
                    (x - a) / (b - a)
                } else {
                    (d - x) / (d - c)
                }
            }
            Self::Gaussian { center, sigma } => {
                (-((x - center) * (x - center)) / (2.0 * sigma * sigma)).exp()
            }
        };
        mu.clamp(0.0, 1.0)
    }

    /// Interval outside which the membership is exactly zero.
    ///
    /// `None` for shapes with unbounded support (Gaussian).
    pub fn support(&self) -> Option<(f64, f64)> {
        match *self {
            Self::Triangular { a, c, .. } => Some((a, c)),
            Self::Trapezoidal { a, d, .. } => Some((a, d)),
            Self::Gaussian { .. } => None,
        }
    }

    /// Position used to order terms along the axis.
    fn anchor(&self) -> f64 {
        match *self {
            Self::Triangular { a, .. } => a,
            Self::Trapezoidal { a, .. } => a,
            Self::Gaussian { center, .. } => center,
        }
    }
}

/// A labelled membership function within a variable.
#[derive(Debug, Clone, PartialEq)]
pub struct LinguisticTerm {
    pub label: String,
    pub mf: MembershipFunction,
}

/// Which shape family [`FuzzyVariable::from_crisp_intervals`] builds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MembershipFamily {
    Trapezoidal,
    Triangular,
    Gaussian,
}

impl Default for MembershipFamily {
    fn default() -> Self {
        Self::Trapezoidal
    }
}

impl std::str::FromStr for MembershipFamily {
    type Err = FuzzyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "trapezoidal" => Ok(Self::Trapezoidal),
            "triangular" => Ok(Self::Triangular),
            "gaussian" => Ok(Self::Gaussian),
            other => Err(FuzzyError::BadDocument(format!(
                "unknown membership family '{other}'"
            ))),
        }
    }
}

/// A named measurement axis with an ordered family of linguistic terms.
///
/// Invariants, checked at construction:
/// - every bounded term support lies within the universe (Gaussian terms only
///   need their center inside);
/// - terms are ordered by ascending position along the axis;
/// - term labels are unique;
/// - every point of the universe has at least one term with membership > 0.
#[derive(Debug, Clone, PartialEq)]
pub struct FuzzyVariable {
    name: String,
    universe: (f64, f64),
    terms: Vec<LinguisticTerm>,
}

impl FuzzyVariable {
    pub fn new(
        name: impl Into<String>,
        universe: (f64, f64),
        terms: Vec<LinguisticTerm>,
    ) -> Result<Self, FuzzyError> {
        let name = name.into();
        let (lo, hi) = universe;
        let fail = |msg: String| Err(FuzzyError::InvalidVariable(name.clone(), msg));
        if !lo.is_finite() || !hi.is_finite() || lo >= hi {
            return fail(format!("universe [{lo}, {hi}] is not a valid interval"));
        }
        if terms.is_empty() {
            return fail("variable has no terms".into());
        }
        let mut seen = std::collections::BTreeSet::new();
        for t in &terms {
            if !seen.insert(t.label.as_str()) {
                return fail(format!("duplicate term label '{}'", t.label));
            }
            if let Some((a, b)) = t.mf.support() {
                if a < lo || b > hi {
                    return fail(format!(
                        "term '{}' support [{a}, {b}] escapes the universe [{lo}, {hi}]",
                        t.label
                    ));
                }
            } else {
                let c = t.mf.anchor();
                if c < lo || c > hi {
                    return fail(format!("term '{}' center {c} is outside the universe", t.label));
                }
            }
        }
        for w in terms.windows(2) {
            if w[0].mf.anchor() > w[1].mf.anchor() {
                return fail(format!(
                    "terms '{}' and '{}' are not in ascending axis order",
                    w[0].label, w[1].label
                ));
            }
        }
        let var = Self { name, universe, terms };
        var.check_coverage()?;
        Ok(var)
    }

    /// Coverage invariant: no point of the universe has all-zero membership.
    fn check_coverage(&self) -> Result<(), FuzzyError> {
        // Gaussians are positive everywhere.
        if self.terms.iter().any(|t| t.mf.support().is_none()) {
            return Ok(());
        }
        let fail = |msg: String| Err(FuzzyError::InvalidVariable(self.name.clone(), msg));
        let (lo, hi) = self.universe;
        for edge in [lo, hi] {
            if !self.terms.iter().any(|t| t.mf.evaluate(edge) > 0.0) {
                return fail(format!("no term is active at universe edge {edge}"));
            }
        }
        // Bounded memberships are positive on the open interior of their
        // support, so covering the interior needs strictly overlapping chains.
        let mut supports: Vec<(f64, f64)> =
            self.terms.iter().filter_map(|t| t.mf.support()).collect();
        supports.sort_by(|x, y| x.partial_cmp(y).expect("finite supports"));
        let mut covered_to = supports[0].1;
        for &(a, b) in &supports[1..] {
            if a >= covered_to && covered_to < hi {
                return fail(format!("coverage gap near {covered_to}"));
            }
            covered_to = covered_to.max(b);
        }
        if covered_to < hi {
            return fail(format!("coverage stops at {covered_to}, before {hi}"));
        }
        Ok(())
    }

    /// Builds the default banded construction from crisp interval boundaries.
    ///
    /// `boundaries` are the `n` interior cut points separating `n + 1`
    /// labelled intervals. Each boundary `t` gets a transition band
    /// `[t - delta, t + delta]`:
    ///
    /// - `Trapezoidal`: adjacent terms ramp complementarily inside the band
    ///   (degrees sum to 1) and plateau at 1 outside it;
    /// - `Triangular`: interior terms peak at their interval midpoint with
    ///   feet one band beyond the interval; edge terms stay shouldered;
    /// - `Gaussian`: each term is centred on its interval midpoint with
    ///   `sigma = width / 4`.
    pub fn from_crisp_intervals(
        name: impl Into<String>,
        universe: (f64, f64),
        boundaries: &[f64],
        labels: &[&str],
        delta: f64,
        family: MembershipFamily,
    ) -> Result<Self, FuzzyError> {
        let name = name.into();
        let (lo, hi) = universe;
        let fail = |msg: String| Err(FuzzyError::InvalidVariable(name.clone(), msg));
        if labels.len() != boundaries.len() + 1 || boundaries.is_empty() {
            return fail(format!(
                "{} labels cannot partition a universe with {} boundaries",
                labels.len(),
                boundaries.len()
            ));
        }
        if !delta.is_finite() || delta <= 0.0 {
            return fail(format!("band half-width must be positive, got {delta}"));
        }
        if boundaries.windows(2).any(|w| w[0] >= w[1]) {
            return fail("boundaries must be strictly increasing".into());
        }
        let first = boundaries[0];
        let last = boundaries[boundaries.len() - 1];
        if first - delta < lo || last + delta > hi {
            return fail(format!(
                "bands around {first} and {last} escape the universe [{lo}, {hi}]"
            ));
        }
        if boundaries.windows(2).any(|w| w[0] + delta > w[1] - delta) {
            return fail(format!("bands of half-width {delta} overlap"));
        }

        // Interval k spans [edges[k], edges[k + 1]].
        let mut edges = Vec::with_capacity(boundaries.len() + 2);
        edges.push(lo);
        edges.extend_from_slice(boundaries);
        edges.push(hi);

        let n = labels.len();
        let mut terms = Vec::with_capacity(n);
        for (k, &label) in labels.iter().enumerate() {
            let (ilo, ihi) = (edges[k], edges[k + 1]);
            let mf = match family {
                MembershipFamily::Trapezoidal => {
                    let a = if k == 0 { lo } else { ilo - delta };
                    let b = if k == 0 { lo } else { ilo + delta };
                    let c = if k == n - 1 { hi } else { ihi - delta };
                    let d = if k == n - 1 { hi } else { ihi + delta };
                    MembershipFunction::trapezoidal(a, b, c, d)?
                }
                MembershipFamily::Triangular => {
                    if k == 0 {
                        MembershipFunction::trapezoidal(lo, lo, ihi - delta, ihi + delta)?
                    } else if k == n - 1 {
                        MembershipFunction::trapezoidal(ilo - delta, ilo + delta, hi, hi)?
                    } else {
                        MembershipFunction::triangular(
                            ilo - delta,
                            (ilo + ihi) / 2.0,
                            ihi + delta,
                        )?
                    }
                }
                MembershipFamily::Gaussian => {
                    MembershipFunction::gaussian((ilo + ihi) / 2.0, (ihi - ilo) / 4.0)?
                }
            };
            terms.push(LinguisticTerm { label: label.to_string(), mf });
        }
        Self::new(name, universe, terms)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn universe(&self) -> (f64, f64) {
        self.universe
    }

    pub fn terms(&self) -> &[LinguisticTerm] {
        &self.terms
    }

    pub fn term(&self, label: &str) -> Option<&LinguisticTerm> {
        self.terms.iter().find(|t| t.label == label)
    }

    /// Degrees of membership of `x` in every term.
    ///
    /// Values outside the universe are clamped to its nearest edge, so an
    /// analyzer reading beyond the reference maximum keeps the nearest
    /// linguistic meaning. Non-finite inputs are rejected.
    pub fn fuzzify(&self, x: f64) -> Result<BTreeMap<String, f64>, FuzzyError> {
        if !x.is_finite() {
            return Err(FuzzyError::NonFiniteInput(self.name.clone()));
        }
        let x = x.clamp(self.universe.0, self.universe.1);
        Ok(self
            .terms
            .iter()
            .map(|t| (t.label.clone(), t.mf.evaluate(x)))
            .collect())
    }
}

// ---------------------------------------------------------------------------
// JSON document format
//
// [
//   { "name": "WBC", "universe": [0.0, 60.0],
//     "terms": [ { "label": "low", "shape": "trapezoidal",
//                  "params": [0.0, 0.0, 3.5, 4.5] }, ... ] },
//   ...
// ]
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct TermDoc {
    label: String,
    shape: String,
    params: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct VariableDoc {
    name: String,
    universe: [f64; 2],
    terms: Vec<TermDoc>,
}

fn mf_from_doc(doc: &TermDoc) -> Result<MembershipFunction, FuzzyError> {
    let p = &doc.params;
    let want = |n: usize| {
        if p.len() == n {
            Ok(())
        } else {
            Err(FuzzyError::BadDocument(format!(
                "term '{}': shape '{}' takes {n} params, got {}",
                doc.label,
                doc.shape,
                p.len()
            )))
        }
    };
    match doc.shape.as_str() {
        "triangular" => {
            want(3)?;
            MembershipFunction::triangular(p[0], p[1], p[2])
        }
        "trapezoidal" => {
            want(4)?;
            MembershipFunction::trapezoidal(p[0], p[1], p[2], p[3])
        }
        "gaussian" => {
            want(2)?;
            MembershipFunction::gaussian(p[0], p[1])
        }
        other => Err(FuzzyError::BadDocument(format!(
            "term '{}': unknown shape '{other}'",
            doc.label
        ))),
    }
}

fn mf_to_doc(label: &str, mf: &MembershipFunction) -> TermDoc {
    let (shape, params) = match *mf {
        MembershipFunction::Triangular { a, b, c } => ("triangular", vec![a, b, c]),
        MembershipFunction::Trapezoidal { a, b, c, d } => ("trapezoidal", vec![a, b, c, d]),
        MembershipFunction::Gaussian { center, sigma } => ("gaussian", vec![center, sigma]),
    };
    TermDoc { label: label.to_string(), shape: shape.to_string(), params }
}

/// Parses a JSON array of variable definitions.
pub fn variables_from_json(text: &str) -> Result<Vec<FuzzyVariable>, FuzzyError> {
    let docs: Vec<VariableDoc> =
        serde_json::from_str(text).map_err(|e| FuzzyError::BadDocument(e.to_string()))?;
    docs.iter()
        .map(|d| {
            let terms = d
                .terms
                .iter()
                .map(|t| Ok(LinguisticTerm { label: t.label.clone(), mf: mf_from_doc(t)? }))
                .collect::<Result<Vec<_>, FuzzyError>>()?;
            FuzzyVariable::new(d.name.clone(), (d.universe[0], d.universe[1]), terms)
        })
        .collect()
}

/// Renders variable definitions as the JSON document accepted by
/// [`variables_from_json`].
pub fn variables_to_json(vars: &[FuzzyVariable]) -> String {
    let docs: Vec<VariableDoc> = vars
        .iter()
        .map(|v| VariableDoc {
            name: v.name.clone(),
            universe: [v.universe.0, v.universe.1],
            terms: v.terms.iter().map(|t| mf_to_doc(&t.label, &t.mf)).collect(),
        })
        .collect();
    let mut s = serde_json::to_string_pretty(&docs).expect("variable docs serialize");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn wbc() -> FuzzyVariable {
        FuzzyVariable::from_crisp_intervals(
            "WBC",
            (0.0, 60.0),
            &[4.0, 10.0],
            &["low", "normal", "high"],
            0.5,
            MembershipFamily::Trapezoidal,
        )
        .unwrap()
    }

    #[test]
    fn triangular_peak_is_one() {
        let mf = MembershipFunction::triangular(0.0, 5.0, 10.0).unwrap();
        assert_eq!(mf.evaluate(5.0), 1.0);
    }

    #[test]
    fn triangular_ramp_interpolates() {
        let mf = MembershipFunction::triangular(0.0, 5.0, 10.0).unwrap();
        // (2.5 - 0) / (5 - 0)
        assert_eq!(mf.evaluate(2.5), 0.5);
        assert_eq!(mf.evaluate(-1.0), 0.0);
        assert_eq!(mf.evaluate(11.0), 0.0);
    }

    #[test]
    fn trapezoid_plateau_is_one() {
        let mf = MembershipFunction::trapezoidal(3.5, 4.5, 9.5, 10.5).unwrap();
        assert_eq!(mf.evaluate(7.0), 1.0);
        assert_eq!(mf.evaluate(4.5), 1.0);
        assert_eq!(mf.evaluate(9.5), 1.0);
        assert_eq!(mf.evaluate(3.5), 0.0);
        assert_eq!(mf.evaluate(10.5), 0.0);
    }

    #[test]
    fn gaussian_peak_is_one() {
        let mf = MembershipFunction::gaussian(7.0, 1.0).unwrap();
        assert_eq!(mf.evaluate(7.0), 1.0);
        assert!(mf.evaluate(9.0) < 1.0);
        assert!(mf.evaluate(9.0) > 0.0);
    }

    #[test]
    fn invalid_shapes_are_rejected() {
        assert!(MembershipFunction::triangular(5.0, 3.0, 10.0).is_err());
        assert!(MembershipFunction::trapezoidal(0.0, 2.0, 1.0, 3.0).is_err());
        assert!(MembershipFunction::gaussian(0.0, 0.0).is_err());
        assert!(MembershipFunction::gaussian(0.0, -1.0).is_err());
        assert!(MembershipFunction::triangular(f64::NAN, 0.0, 1.0).is_err());
    }

    #[test]
    fn degenerate_shoulders_evaluate() {
        let left = MembershipFunction::trapezoidal(0.0, 0.0, 3.5, 4.5).unwrap();
        assert_eq!(left.evaluate(0.0), 1.0);
        let right = MembershipFunction::trapezoidal(9.5, 10.5, 60.0, 60.0).unwrap();
        assert_eq!(right.evaluate(60.0), 1.0);
    }

    #[test]
    fn fuzzify_core_value() {
        let deg = wbc().fuzzify(7.0).unwrap();
        assert_eq!(deg["low"], 0.0);
        assert_eq!(deg["normal"], 1.0);
        assert_eq!(deg["high"], 0.0);
    }

    #[test]
    fn fuzzify_boundary_midpoint_is_complementary() {
        let deg = wbc().fuzzify(4.0).unwrap();
        assert_eq!(deg["low"], 0.5);
        assert_eq!(deg["normal"], 0.5);
        assert_eq!(deg["high"], 0.0);
    }

    #[test]
    fn fuzzify_clamps_to_universe() {
        let plt = FuzzyVariable::from_crisp_intervals(
            "PLT",
            (0.0, 1500.0),
            &[100.0, 450.0],
            &["low", "normal", "high"],
            25.0,
            MembershipFamily::Trapezoidal,
        )
        .unwrap();
        let deg = plt.fuzzify(2000.0).unwrap();
        assert_eq!(deg["low"], 0.0);
        assert_eq!(deg["normal"], 0.0);
        assert_eq!(deg["high"], 1.0);
    }

    #[test]
    fn fuzzify_rejects_non_finite() {
        assert!(wbc().fuzzify(f64::NAN).is_err());
        assert!(wbc().fuzzify(f64::INFINITY).is_err());
    }

    #[test]
    fn triangular_family_keeps_cores() {
        let v = FuzzyVariable::from_crisp_intervals(
            "WBC",
            (0.0, 60.0),
            &[4.0, 10.0],
            &["low", "normal", "high"],
            0.5,
            MembershipFamily::Triangular,
        )
        .unwrap();
        let deg = v.fuzzify(7.0).unwrap();
        assert_eq!(deg["normal"], 1.0);
        assert_eq!(deg["low"], 0.0);
    }

    #[test]
    fn gaussian_family_centers_on_midpoints() {
        let v = FuzzyVariable::from_crisp_intervals(
            "WBC",
            (0.0, 60.0),
            &[4.0, 10.0],
            &["low", "normal", "high"],
            0.5,
            MembershipFamily::Gaussian,
        )
        .unwrap();
        assert_eq!(
            v.term("normal").unwrap().mf,
            MembershipFunction::Gaussian { center: 7.0, sigma: 1.5 }
        );
        assert_eq!(v.fuzzify(7.0).unwrap()["normal"], 1.0);
    }

    #[test]
    fn construction_rejects_bad_bands() {
        // Band wider than the gap between boundaries.
        assert!(FuzzyVariable::from_crisp_intervals(
            "X",
            (0.0, 20.0),
            &[4.0, 5.0],
            &["low", "normal", "high"],
            0.6,
            MembershipFamily::Trapezoidal,
        )
        .is_err());
        // Band escaping the universe.
        assert!(FuzzyVariable::from_crisp_intervals(
            "X",
            (0.0, 20.0),
            &[0.3, 10.0],
            &["low", "normal", "high"],
            0.5,
            MembershipFamily::Trapezoidal,
        )
        .is_err());
        assert!(FuzzyVariable::from_crisp_intervals(
            "X",
            (0.0, 20.0),
            &[10.0, 4.0],
            &["low", "normal", "high"],
            0.5,
            MembershipFamily::Trapezoidal,
        )
        .is_err());
    }

    #[test]
    fn variable_invariants_are_enforced() {
        let t = |a, b, c, d| LinguisticTerm {
            label: String::new(),
            mf: MembershipFunction::trapezoidal(a, b, c, d).unwrap(),
        };
        // Support escaping universe.
        let mut bad = t(0.0, 0.0, 5.0, 12.0);
        bad.label = "low".into();
        assert!(FuzzyVariable::new("X", (0.0, 10.0), vec![bad]).is_err());
        // Duplicate labels.
        let mut a = t(0.0, 0.0, 5.0, 6.0);
        a.label = "low".into();
        let mut b = t(5.0, 6.0, 10.0, 10.0);
        b.label = "low".into();
        assert!(FuzzyVariable::new("X", (0.0, 10.0), vec![a, b]).is_err());
        // Coverage gap between supports.
        let mut a = t(0.0, 0.0, 2.0, 3.0);
        a.label = "low".into();
        let mut b = t(5.0, 6.0, 10.0, 10.0);
        b.label = "high".into();
        assert!(FuzzyVariable::new("X", (0.0, 10.0), vec![a, b]).is_err());
    }

    #[test]
    fn json_document_round_trips() {
        let vars = vec![wbc()];
        let text = variables_to_json(&vars);
        let back = variables_from_json(&text).unwrap();
        assert_eq!(vars, back);
    }

    #[test]
    fn json_document_rejects_garbage() {
        assert!(variables_from_json("[{\"name\":\"X\"}]").is_err());
        let bad_shape = r#"[{"name":"X","universe":[0,10],
            "terms":[{"label":"low","shape":"sigmoid","params":[1,2]}]}]"#;
        assert!(variables_from_json(bad_shape).is_err());
        let bad_params = r#"[{"name":"X","universe":[0,10],
            "terms":[{"label":"low","shape":"triangular","params":[1,2]}]}]"#;
        assert!(variables_from_json(bad_params).is_err());
    }

    prop_compose! {
        fn arb_triangular()(raw in prop::array::uniform3(-1.0e4..1.0e4f64)) -> MembershipFunction {
            let mut v = raw;
            v.sort_by(f64::total_cmp);
            MembershipFunction::triangular(v[0], v[1], v[2]).unwrap()
        }
    }

    prop_compose! {
        fn arb_trapezoidal()(raw in prop::array::uniform4(-1.0e4..1.0e4f64)) -> MembershipFunction {
            let mut v = raw;
            v.sort_by(f64::total_cmp);
            MembershipFunction::trapezoidal(v[0], v[1], v[2], v[3]).unwrap()
        }
    }

    prop_compose! {
        fn arb_gaussian()(c in -1.0e4..1.0e4f64, s in 1.0e-3..1.0e3f64) -> MembershipFunction {
            MembershipFunction::gaussian(c, s).unwrap()
        }
    }

    fn arb_mf() -> impl Strategy<Value = MembershipFunction> {
        prop_oneof![arb_triangular(), arb_trapezoidal(), arb_gaussian()]
    }

    proptest! {
        #[test]
        fn membership_stays_in_unit_interval(mf in arb_mf(), x in -1.0e5..1.0e5f64) {
            let mu = mf.evaluate(x);
            prop_assert!((0.0..=1.0).contains(&mu));
        }

        #[test]
        fn trapezoid_plateau_property(mf in arb_trapezoidal(), s in 0.0..=1.0f64) {
            if let MembershipFunction::Trapezoidal { b, c, .. } = mf {
                let x = (b + s * (c - b)).clamp(b, c);
                prop_assert_eq!(mf.evaluate(x), 1.0);
            }
        }

        #[test]
        fn ramps_are_monotone(mf in prop_oneof![arb_triangular(), arb_trapezoidal()],
                              s1 in 0.0..=1.0f64, s2 in 0.0..=1.0f64) {
            let (a, b, c, d) = match mf {
                MembershipFunction::Triangular { a, b, c } => (a, b, b, c),
                MembershipFunction::Trapezoidal { a, b, c, d } => (a, b, c, d),
                _ => unreachable!(),
            };
            let (lo, hi) = (s1.min(s2), s1.max(s2));
            // Nondecreasing on the rising edge.
            let x1 = a + lo * (b - a);
            let x2 = a + hi * (b - a);
            prop_assert!(mf.evaluate(x1) <= mf.evaluate(x2) + 1e-12);
            // Nonincreasing on the falling edge.
            let x3 = c + lo * (d - c);
            let x4 = c + hi * (d - c);
            prop_assert!(mf.evaluate(x3) + 1e-12 >= mf.evaluate(x4));
        }

        #[test]
        fn banded_construction_is_complementary(
            lo in -100.0..0.0f64,
            gap1 in 2.0..50.0f64,
            gap2 in 2.0..50.0f64,
            tail in 2.0..50.0f64,
            delta in 0.05..0.9f64,
            s in 0.0..=1.0f64,
            band_pick in 0..2usize,
        ) {
            let t1 = lo + gap1;
            let t2 = t1 + gap2;
            let hi = t2 + tail;
            let v = FuzzyVariable::from_crisp_intervals(
                "X", (lo, hi), &[t1, t2], &["low", "normal", "high"], delta,
                MembershipFamily::Trapezoidal,
            ).unwrap();
            let (t, pair) = if band_pick == 0 {
                (t1, ("low", "normal"))
            } else {
                (t2, ("normal", "high"))
            };
            let x = t - delta + s * 2.0 * delta;
            let deg = v.fuzzify(x).unwrap();
            prop_assert!((deg[pair.0] + deg[pair.1] - 1.0).abs() < 1e-12);
        }

        #[test]
        fn banded_construction_covers_universe(
            lo in -100.0..0.0f64,
            gap1 in 2.0..50.0f64,
            gap2 in 2.0..50.0f64,
            tail in 2.0..50.0f64,
            delta in 0.05..0.9f64,
            s in 0.0..=1.0f64,
        ) {
            let t1 = lo + gap1;
            let t2 = t1 + gap2;
            let hi = t2 + tail;
            let v = FuzzyVariable::from_crisp_intervals(
                "X", (lo, hi), &[t1, t2], &["low", "normal", "high"], delta,
                MembershipFamily::Trapezoidal,
            ).unwrap();
            let x = lo + s * (hi - lo);
            let deg = v.fuzzify(x).unwrap();
            prop_assert!(deg.values().cloned().fold(0.0, f64::max) > 0.0);
        }
    }
}
