//! A from-scratch random forest of axis-aligned CART trees.
//!
//! Each tree is grown on a bootstrap resample (n draws with replacement) of
//! the training data. At every node a random subset of features is
//! considered; candidate thresholds are the midpoints between consecutive
//! distinct sorted values, and the split minimizing the weighted child Gini
//! impurity wins. Ties break to the lowest feature index, then the lowest
//! threshold, so fitting is fully deterministic given the seed. Prediction
//! is majority vote over the trees, ties to the lowest class index.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::Dataset;
use crate::kb::DiseaseClass;
use crate::seeding::derive_seed;

#[derive(Debug, Error)]
pub enum ForestError {
    #[error("training set is empty")]
    EmptyTrainingSet,
    #[error("sample {sample}: feature {feature} is not finite")]
    NonFiniteFeature { sample: usize, feature: usize },
    #[error("feature vector has length {got}, expected {expected}")]
    DimensionMismatch { got: usize, expected: usize },
    #[error("class counts sum to zero")]
    ZeroTotal,
    #[error("invalid forest config: {0}")]
    BadConfig(String),
}

/// The split criterion. Gini impurity is the only one supported.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SplitCriterion {
    #[default]
    Gini,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestConfig {
    pub n_estimators: usize,
    pub max_depth: usize,
    pub criterion: SplitCriterion,
    /// Features considered per node; `None` means `ceil(sqrt(d))`.
    pub features_per_split: Option<usize>,
    pub min_samples_split: usize,
    pub seed: u64,
}

impl Default for ForestConfig {
    fn default() -> Self {
        Self {
            n_estimators: 100,
            max_depth: 6,
            criterion: SplitCriterion::Gini,
            features_per_split: None,
            min_samples_split: 2,
            seed: 42,
        }
    }
}

impl ForestConfig {
    fn validate(&self) -> Result<(), ForestError> {
        if self.n_estimators < 1 {
            return Err(ForestError::BadConfig("n_estimators must be >= 1".into()));
        }
        if self.max_depth < 1 {
            return Err(ForestError::BadConfig("max_depth must be >= 1".into()));
        }
        if self.min_samples_split < 2 {
            return Err(ForestError::BadConfig("min_samples_split must be >= 2".into()));
        }
        Ok(())
    }
}

/// Gini impurity `1 - sum((n_k / n)^2)` of a class-count vector.
pub fn gini(counts: &[u32]) -> Result<f64, ForestError> {
    let total: u64 = counts.iter().map(|&c| u64::from(c)).sum();
    if total == 0 {
        return Err(ForestError::ZeroTotal);
    }
    Ok(gini_of(counts, total))
}

fn gini_of(counts: &[u32], total: u64) -> f64 {
    let n = total as f64;
    1.0 - counts
        .iter()
        .map(|&c| {
            let p = f64::from(c) / n;
            p * p
        })
        .sum::<f64>()
}

/// A chosen split: route samples with `x[feature] <= threshold` left.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Split {
    pub feature: usize,
    pub threshold: f64,
    /// Parent impurity minus weighted child impurity; strictly positive.
    pub gain: f64,
}

/// Exhaustive scan over the feature subset for the threshold minimizing the
/// weighted child Gini impurity. Returns `None` when no candidate reduces
/// the parent impurity (pure node, or no distinct values).
pub fn best_split(
    features: &[Vec<f64>],
    labels: &[usize],
    n_classes: usize,
    feature_subset: &[usize],
) -> Option<Split> {
    let idx: Vec<usize> = (0..features.len()).collect();
    best_split_indexed(features, labels, n_classes, &idx, feature_subset)
}

fn best_split_indexed(
    features: &[Vec<f64>],
    labels: &[usize],
    n_classes: usize,
    idx: &[usize],
    feature_subset: &[usize],
) -> Option<Split> {
    let n = idx.len();
    if n < 2 {
        return None;
    }
    let mut parent_counts = vec![0u32; n_classes];
    for &i in idx {
        parent_counts[labels[i]] += 1;
    }
    let parent = gini_of(&parent_counts, n as u64);

    let mut best: Option<(f64, usize, f64)> = None; // (weighted, feature, threshold)
    let mut column: Vec<(f64, usize)> = Vec::with_capacity(n);
    for &f in feature_subset {
        column.clear();
        column.extend(idx.iter().map(|&i| (features[i][f], labels[i])));
        column.sort_by(|a, b| a.0.total_cmp(&b.0));

        let mut left = vec![0u32; n_classes];
        let mut right = parent_counts.clone();
        for i in 0..n - 1 {
            left[column[i].1] += 1;
            right[column[i].1] -= 1;
            let (lo, hi) = (column[i].0, column[i + 1].0);
            if lo == hi {
                continue;
            }
            // A midpoint can round up onto `hi`; fall back to `lo` so the
            // `x <= threshold` rule still cuts between the two values.
            let mut threshold = (lo + hi) / 2.0;
            if threshold >= hi {
                threshold = lo;
            }
            let nl = (i + 1) as f64;
            let nr = (n - i - 1) as f64;
            let weighted = (nl * gini_of(&left, (i + 1) as u64)
                + nr * gini_of(&right, (n - i - 1) as u64))
                / n as f64;
            let better = match best {
                None => true,
                // Strict improvement only: earlier candidates win ties, and
                // the subset is scanned in ascending (feature, threshold)
                // order.
                Some((w, _, _)) => weighted < w,
            };
            if better {
                best = Some((weighted, f, threshold));
            }
        }
    }
    best.and_then(|(weighted, feature, threshold)| {
        let gain = parent - weighted;
        (gain > 0.0).then_some(Split { feature, threshold, gain })
    })
}

/// A node of a fitted tree. Leaves hold the class counts of the training
/// samples that reached them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "node")]
pub enum TreeNode {
    Leaf {
        counts: Vec<u32>,
    },
    Split {
        feature: usize,
        threshold: f64,
        gain: f64,
        samples: u32,
        left: Box<TreeNode>,
        right: Box<TreeNode>,
    },
}

impl TreeNode {
    fn leaf_counts(&self, x: &[f64]) -> &[u32] {
        match self {
            TreeNode::Leaf { counts } => counts,
            TreeNode::Split { feature, threshold, left, right, .. } => {
                if x[*feature] <= *threshold {
                    left.leaf_counts(x)
                } else {
                    right.leaf_counts(x)
                }
            }
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            TreeNode::Leaf { .. } => 0,
            TreeNode::Split { left, right, .. } => 1 + left.depth().max(right.depth()),
        }
    }

    fn accumulate_importance(&self, root_samples: f64, into: &mut [f64]) {
        if let TreeNode::Split { feature, gain, samples, left, right, .. } = self {
            into[*feature] += f64::from(*samples) / root_samples * gain;
            left.accumulate_importance(root_samples, into);
            right.accumulate_importance(root_samples, into);
        }
    }
}

/// A fitted ensemble. Immutable; prediction is pure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Forest {
    pub config: ForestConfig,
    pub class_order: Vec<DiseaseClass>,
    pub n_features: usize,
    pub trees: Vec<TreeNode>,
}

impl Forest {
    /// Grows `config.n_estimators` trees on bootstrap resamples of `train`.
    /// Deterministic given `config.seed`: each tree derives its own RNG
    /// stream, so trees could equally be grown in parallel.
    pub fn fit(train: &Dataset, config: &ForestConfig) -> Result<Forest, ForestError> {
        config.validate()?;
        if train.is_empty() {
            return Err(ForestError::EmptyTrainingSet);
        }
        let mut class_order: Vec<DiseaseClass> =
            train.class_counts().keys().copied().collect();
        class_order.sort_by_key(|c| c.index());
        let n_classes = class_order.len();

        let features: Vec<Vec<f64>> =
            train.samples.iter().map(|s| s.features.to_vec()).collect();
        for (si, row) in features.iter().enumerate() {
            for (fi, &x) in row.iter().enumerate() {
                if !x.is_finite() {
                    return Err(ForestError::NonFiniteFeature { sample: si, feature: fi });
                }
            }
        }
        let labels: Vec<usize> = train
            .samples
            .iter()
            .map(|s| class_order.iter().position(|&c| c == s.label).expect("observed class"))
            .collect();

        let d = 5usize;
        let fps = config
            .features_per_split
            .unwrap_or_else(|| (d as f64).sqrt().ceil() as usize)
            .clamp(1, d);
        let n = features.len();

        let mut trees = Vec::with_capacity(config.n_estimators);
        for t in 0..config.n_estimators {
            let mut rng =
                ChaCha8Rng::seed_from_u64(derive_seed(config.seed, "tree", t as u64));
            let bootstrap: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n)).collect();
            trees.push(grow(
                &features,
                &labels,
                n_classes,
                bootstrap,
                0,
                config.max_depth,
                config.min_samples_split,
                fps,
                d,
                &mut rng,
            ));
        }
        Ok(Forest { config: config.clone(), class_order, n_features: d, trees })
    }

    fn check_dim(&self, x: &[f64]) -> Result<(), ForestError> {
        if x.len() != self.n_features {
            return Err(ForestError::DimensionMismatch {
                got: x.len(),
                expected: self.n_features,
            });
        }
        Ok(())
    }

    /// Per-class vote fractions, parallel to `class_order`; sums to 1.
    pub fn predict_proba(&self, x: &[f64]) -> Result<Vec<f64>, ForestError> {
        self.check_dim(x)?;
        let mut votes = vec![0u32; self.class_order.len()];
        for tree in &self.trees {
            let counts = tree.leaf_counts(x);
            let mut best = 0usize;
            for (i, &c) in counts.iter().enumerate() {
                if c > counts[best] {
                    best = i;
                }
            }
            votes[best] += 1;
        }
        let n = self.trees.len() as f64;
        Ok(votes.into_iter().map(|v| f64::from(v) / n).collect())
    }

    /// Plurality class over the trees' votes; ties go to the lowest class
    /// index.
    pub fn predict(&self, x: &[f64]) -> Result<DiseaseClass, ForestError> {
        let proba = self.predict_proba(x)?;
        let mut best = 0usize;
        for (i, &p) in proba.iter().enumerate() {
            if p > proba[best] {
                best = i;
            }
        }
        Ok(self.class_order[best])
    }

    /// Mean decrease in impurity per feature, normalized to sum to 1 (all
    /// zeros when no tree ever split).
    pub fn feature_importance(&self) -> Vec<f64> {
        let mut totals = vec![0.0f64; self.n_features];
        for tree in &self.trees {
            let root_samples = match tree {
                TreeNode::Split { samples, .. } => f64::from(*samples),
                TreeNode::Leaf { counts } => {
                    counts.iter().map(|&c| f64::from(c)).sum::<f64>()
                }
            };
            if root_samples > 0.0 {
                tree.accumulate_importance(root_samples, &mut totals);
            }
        }
        let sum: f64 = totals.iter().sum();
        if sum > 0.0 {
            for t in &mut totals {
                *t /= sum;
            }
        }
        totals
    }

    /// Depth of every tree; all are bounded by `config.max_depth`.
    pub fn depths(&self) -> Vec<usize> {
        self.trees.iter().map(TreeNode::depth).collect()
    }
}

#[allow(clippy::too_many_arguments)]
fn grow(
    features: &[Vec<f64>],
    labels: &[usize],
    n_classes: usize,
    idx: Vec<usize>,
    depth: usize,
    max_depth: usize,
    min_samples_split: usize,
    fps: usize,
    d: usize,
    rng: &mut ChaCha8Rng,
) -> TreeNode {
    let mut counts = vec![0u32; n_classes];
    for &i in &idx {
        counts[labels[i]] += 1;
    }
    let pure = counts.iter().filter(|&&c| c > 0).count() <= 1;
    if depth >= max_depth || idx.len() < min_samples_split || pure {
        return TreeNode::Leaf { counts };
    }
    let mut subset = rand::seq::index::sample(rng, d, fps).into_vec();
    subset.sort_unstable();
    let Some(split) = best_split_indexed(features, labels, n_classes, &idx, &subset) else {
        return TreeNode::Leaf { counts };
    };
    let (mut left_idx, mut right_idx) = (Vec::new(), Vec::new());
    for &i in &idx {
        if features[i][split.feature] <= split.threshold {
            left_idx.push(i);
        } else {
            right_idx.push(i);
        }
    }
    debug_assert!(!left_idx.is_empty() && !right_idx.is_empty());
    let samples = idx.len() as u32;
    let left = grow(
        features, labels, n_classes, left_idx, depth + 1, max_depth, min_samples_split,
        fps, d, rng,
    );
    let right = grow(
        features, labels, n_classes, right_idx, depth + 1, max_depth, min_samples_split,
        fps, d, rng,
    );
    TreeNode::Split {
        feature: split.feature,
        threshold: split.threshold,
        gain: split.gain,
        samples,
        left: Box::new(left),
        right: Box::new(right),
    }
}
