//! Random forest: bagged fully-grown trees with per-node random feature
//! subsets of size ceil(sqrt(m)) by default. Per-tree seeds derive from the
//! master seed, so tree fits can run in parallel without changing results;
//! the score is the mean of the tree scores in tree order.

use rand::Rng;
use rayon::prelude::*;

use crate::dataset::{Dataset, FeatureDef, Value};
use crate::error::ModelError;
use crate::seed::component_rng;

use super::tree::{grow, score_node, TreeData, TreeNode};

#[derive(Debug, Clone, PartialEq)]
pub struct ForestModel {
    pub features: Vec<FeatureDef>,
    pub trees: Vec<TreeNode>,
    pub feature_subset: usize,
    pub bootstrap: bool,
}

pub fn fit_forest(
    train: &Dataset,
    n_trees: usize,
    feature_subset: Option<usize>,
    bootstrap: bool,
    seed: u64,
) -> Result<ForestModel, ModelError> {
    if n_trees == 0 {
        return Err(ModelError::InvalidHyperparameter("forest needs at least one tree".into()));
    }
    if train.is_empty() {
        return Err(ModelError::EmptyTrainingData);
    }
    let data = TreeData::from_dataset(train)?;
    let m = data.arity.len();
    let subset = match feature_subset {
        Some(0) => {
            return Err(ModelError::InvalidHyperparameter(
                "feature subset size must be at least 1".into(),
            ))
        }
        Some(s) => s.min(m),
        None => (m as f64).sqrt().ceil() as usize,
    };

    let n = data.rows.len();
    let trees: Vec<TreeNode> = (0..n_trees)
        .into_par_iter()
        .map(|t| {
            let mut rng = component_rng(seed, "forest-tree", t as u64);
            let indices: Vec<usize> = if bootstrap {
                (0..n).map(|_| rng.gen_range(0..n)).collect()
            } else {
                (0..n).collect()
            };
            grow(&data, &indices, 1, Some((subset, &mut rng)))
        })
        .collect();

    Ok(ForestModel {
        features: train.schema().features.clone(),
        trees,
        feature_subset: subset,
        bootstrap,
    })
}

impl ForestModel {
    pub fn score(&self, values: &[Value]) -> Result<f64, ModelError> {
        super::check_input(&self.features, values)?;
        let sum: f64 = self.trees.iter().map(|t| score_node(t, values)).sum();
        Ok(sum / self.trees.len() as f64)
    }
}
