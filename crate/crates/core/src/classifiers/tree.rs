//! Decision tree over discretized (nominal) inputs.
//!
//! Recursive multiway partitioning on the feature with maximal information
//! gain (ties to schema order). A split is valid when at least two bins hold
//! `min_leaf` instances with known values; growth stops at pure nodes or
//! when no valid split remains. Gain is computed over instances with known
//! values; instances missing the split feature follow the majority child.
//! Leaves score as the Laplace-smoothed good fraction.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::dataset::{Dataset, FeatureDef, FeatureKind, Label, Value};
use crate::error::ModelError;

#[derive(Debug, Clone, PartialEq)]
pub enum TreeNode {
    Leaf {
        good: usize,
        bad: usize,
    },
    Split {
        feature: usize,
        /// Bin index that missing values follow.
        majority: usize,
        good: usize,
        bad: usize,
        children: Vec<TreeNode>,
    },
}

impl TreeNode {
    fn counts(&self) -> (usize, usize) {
        match self {
            TreeNode::Leaf { good, bad } | TreeNode::Split { good, bad, .. } => (*good, *bad),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TreeModel {
    pub features: Vec<FeatureDef>,
    pub min_leaf: usize,
    pub pruned: bool,
    pub root: TreeNode,
}

/// Column-checked working view of a discretized dataset.
pub(super) struct TreeData {
    pub arity: Vec<usize>,
    pub rows: Vec<Vec<Option<u32>>>,
    pub labels: Vec<Label>,
}

impl TreeData {
    pub fn from_dataset(train: &Dataset) -> Result<TreeData, ModelError> {
        let mut arity = Vec::new();
        for f in &train.schema().features {
            match &f.kind {
                FeatureKind::Numeric => return Err(ModelError::NotDiscretized(f.name.clone())),
                FeatureKind::Nominal(domain) => arity.push(domain.len()),
            }
        }
        let rows = train
            .instances()
            .iter()
            .map(|inst| {
                inst.values
                    .iter()
                    .map(|v| match v {
                        Value::Cat(c) => Some(*c),
                        _ => None,
                    })
                    .collect()
            })
            .collect();
        Ok(TreeData {
            arity,
            rows,
            labels: train.instances().iter().map(|i| i.label).collect(),
        })
    }
}

fn entropy_bits(good: usize, bad: usize) -> f64 {
    let n = (good + bad) as f64;
    let mut bits = 0.0;
    for c in [good, bad] {
        if c > 0 {
            let p = c as f64 / n;
            bits -= p * p.log2();
        }
    }
    bits
}

struct SplitChoice {
    feature: usize,
    gain: f64,
    bin_counts: Vec<(usize, usize)>,
}

fn evaluate_split(data: &TreeData, indices: &[usize], feature: usize, min_leaf: usize) -> Option<SplitChoice> {
    let bins = data.arity[feature];
    let mut bin_counts = vec![(0usize, 0usize); bins];
    for &i in indices {
        if let Some(b) = data.rows[i][feature] {
            let cell = &mut bin_counts[b as usize];
            match data.labels[i] {
                Label::Good => cell.0 += 1,
                Label::Bad => cell.1 += 1,
            }
        }
    }
    let occupied = bin_counts.iter().filter(|(g, b)| g + b >= min_leaf).count();
    if occupied < 2 {
        return None;
    }
    let known_good: usize = bin_counts.iter().map(|(g, _)| g).sum();
    let known_bad: usize = bin_counts.iter().map(|(_, b)| b).sum();
    let known = (known_good + known_bad) as f64;
    let mut child_entropy = 0.0;
    for &(g, b) in &bin_counts {
        if g + b > 0 {
            child_entropy += ((g + b) as f64 / known) * entropy_bits(g, b);
        }
    }
    Some(SplitChoice {
        feature,
        gain: entropy_bits(known_good, known_bad) - child_entropy,
        bin_counts,
    })
}

/// Grow one node. `sampler` draws a per-node random feature subset of the
/// given size (random-forest mode); `None` considers every feature. The
/// recursion is depth-first in bin order, so RNG consumption is
/// deterministic.
pub(super) fn grow(
    data: &TreeData,
    indices: &[usize],
    min_leaf: usize,
    mut sampler: Option<(usize, &mut ChaCha8Rng)>,
) -> TreeNode {
    let good = indices.iter().filter(|&&i| data.labels[i] == Label::Good).count();
    let bad = indices.len() - good;
    if good == 0 || bad == 0 {
        return TreeNode::Leaf { good, bad };
    }

    let m = data.arity.len();
    let candidates: Vec<usize> = match &mut sampler {
        // a full-width sample is the plain tree, no draw needed
        None => (0..m).collect(),
        Some((size, _)) if *size >= m => (0..m).collect(),
        Some((size, rng)) => {
            let mut pool: Vec<usize> = (0..m).collect();
            for k in 0..*size {
                let j = rng.gen_range(k..m);
                pool.swap(k, j);
            }
            let mut subset = pool[..*size].to_vec();
            subset.sort_unstable();
            subset
        }
    };

    // Strict > keeps the earliest (schema-order) feature on gain ties.
    let mut best: Option<SplitChoice> = None;
    for f in candidates {
        if let Some(choice) = evaluate_split(data, indices, f, min_leaf) {
            if best.as_ref().map_or(true, |b| choice.gain > b.gain) {
                best = Some(choice);
            }
        }
    }
    let Some(choice) = best else {
        return TreeNode::Leaf { good, bad };
    };

    let majority = choice
        .bin_counts
        .iter()
        .enumerate()
        .max_by_key(|(i, (g, b))| (g + b, std::cmp::Reverse(*i)))
        .map(|(i, _)| i)
        .unwrap();

    let mut child_indices: Vec<Vec<usize>> = vec![Vec::new(); data.arity[choice.feature]];
    for &i in indices {
        let bin = data.rows[i][choice.feature].map_or(majority, |b| b as usize);
        child_indices[bin].push(i);
    }

    let mut children = Vec::with_capacity(child_indices.len());
    for idx in &child_indices {
        if idx.is_empty() {
            // empty bin: predict with the parent's distribution
            children.push(TreeNode::Leaf { good, bad });
        } else {
            let reborrowed = sampler.as_mut().map(|(s, rng)| (*s, &mut **rng));
            children.push(grow(data, idx, min_leaf, reborrowed));
        }
    }

    TreeNode::Split { feature: choice.feature, majority, good, bad, children }
}

fn smoothed_error(good: usize, bad: usize) -> f64 {
    (good.min(bad) as f64 + 1.0) / ((good + bad) as f64 + 2.0)
}

/// Bottom-up leaf collapse: a split whose child would err more than the
/// parent as a leaf is replaced by the parent leaf.
fn prune_node(node: TreeNode) -> TreeNode {
    match node {
        TreeNode::Leaf { .. } => node,
        TreeNode::Split { feature, majority, good, bad, children } => {
            let children: Vec<TreeNode> = children.into_iter().map(prune_node).collect();
            let parent_err = smoothed_error(good, bad);
            let collapse = children.iter().any(|c| {
                let (g, b) = c.counts();
                smoothed_error(g, b) > parent_err
            });
            if collapse {
                TreeNode::Leaf { good, bad }
            } else {
                TreeNode::Split { feature, majority, good, bad, children }
            }
        }
    }
}

pub fn fit_tree(train: &Dataset, min_leaf: usize, prune: bool) -> Result<TreeModel, ModelError> {
    if min_leaf == 0 {
        return Err(ModelError::InvalidHyperparameter("min_leaf must be at least 1".into()));
    }
    if train.is_empty() {
        return Err(ModelError::EmptyTrainingData);
    }
    let data = TreeData::from_dataset(train)?;
    let indices: Vec<usize> = (0..data.rows.len()).collect();
    let mut root = grow(&data, &indices, min_leaf, None);
    if prune {
        root = prune_node(root);
    }
    Ok(TreeModel {
        features: train.schema().features.clone(),
        min_leaf,
        pruned: prune,
        root,
    })
}

pub(super) fn score_node(node: &TreeNode, values: &[Value]) -> f64 {
    match node {
        TreeNode::Leaf { good, bad } => (*good as f64 + 1.0) / ((good + bad) as f64 + 2.0),
        TreeNode::Split { feature, majority, children, .. } => {
            let bin = match values[*feature] {
                Value::Cat(b) => b as usize,
                _ => *majority,
            };
            score_node(&children[bin], values)
        }
    }
}

impl TreeModel {
    pub fn score(&self, values: &[Value]) -> Result<f64, ModelError> {
        super::check_input(&self.features, values)?;
        Ok(score_node(&self.root, values))
    }
}
