//! The six candidate models behind one contract: `score(instance)`
//! estimates P(good | x) in [0, 1].
//!
//! Input conventions per family: Naive Bayes, the tree, and the forest
//! consume discretized nominal bins; logistic regression and the SVM one-hot
//! encode those bins internally (reference bin dropped, numerics
//! standardized); the nearest-neighbor model works on raw numerics with
//! min-max normalization plus 0/1 nominal mismatch.

pub mod encode;
mod forest;
mod logistic;
mod naive_bayes;
mod nn1;
mod svm;
pub(crate) mod tree;

pub use encode::{EncodedFeature, OneHotEncoder};
pub use forest::{fit_forest, ForestModel};
pub use logistic::{
    fit_logistic, fit_logistic_raw, log_likelihood, log_likelihood_gradient, logistic_fn,
    LogisticModel,
};
pub use naive_bayes::{fit_naive_bayes, NaiveBayesModel};
pub use nn1::{fit_nn1, FeatureStats, Nn1Model};
pub use svm::{fit_svm, fit_svm_raw, SvmModel};
pub use tree::{fit_tree, TreeModel, TreeNode};

use crate::dataset::{Dataset, FeatureDef, FeatureKind, Value};
use crate::error::ModelError;

/// Which of the six model families to fit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassifierKind {
    NaiveBayes,
    Logistic,
    Nn1,
    Tree,
    Forest,
    SvmLinear,
}

impl ClassifierKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ClassifierKind::NaiveBayes => "naive_bayes",
            ClassifierKind::Logistic => "logistic",
            ClassifierKind::Nn1 => "nn1",
            ClassifierKind::Tree => "tree",
            ClassifierKind::Forest => "forest",
            ClassifierKind::SvmLinear => "svm_linear",
        }
    }

    pub fn parse(s: &str) -> Option<ClassifierKind> {
        Some(match s {
            "naive_bayes" => ClassifierKind::NaiveBayes,
            "logistic" => ClassifierKind::Logistic,
            "nn1" => ClassifierKind::Nn1,
            "tree" => ClassifierKind::Tree,
            "forest" => ClassifierKind::Forest,
            "svm_linear" => ClassifierKind::SvmLinear,
            _ => return None,
        })
    }

    pub const ALL: [ClassifierKind; 6] = [
        ClassifierKind::NaiveBayes,
        ClassifierKind::Logistic,
        ClassifierKind::SvmLinear,
        ClassifierKind::Nn1,
        ClassifierKind::Tree,
        ClassifierKind::Forest,
    ];

    /// True for families that consume discretized bins; the
    /// nearest-neighbor model is the one raw-numeric consumer.
    pub fn wants_discretized(self) -> bool {
        !matches!(self, ClassifierKind::Nn1)
    }
}

/// Model family plus hyperparameters.
#[derive(Debug, Clone, PartialEq)]
pub enum ClassifierSpec {
    NaiveBayes { alpha: f64 },
    Logistic { ridge: f64, max_iter: usize, tol: f64 },
    Nn1 { normalize: bool },
    Tree { min_leaf: usize, prune: bool },
    Forest { trees: usize, feature_subset: Option<usize>, bootstrap: bool },
    SvmLinear { c: f64, epochs: usize },
}

impl ClassifierSpec {
    /// Default hyperparameters for a family.
    pub fn default_for(kind: ClassifierKind) -> ClassifierSpec {
        match kind {
            ClassifierKind::NaiveBayes => ClassifierSpec::NaiveBayes { alpha: 1.0 },
            ClassifierKind::Logistic => {
                ClassifierSpec::Logistic { ridge: 1e-8, max_iter: 100, tol: 1e-8 }
            }
            ClassifierKind::Nn1 => ClassifierSpec::Nn1 { normalize: true },
            ClassifierKind::Tree => ClassifierSpec::Tree { min_leaf: 2, prune: false },
            ClassifierKind::Forest => {
                ClassifierSpec::Forest { trees: 100, feature_subset: None, bootstrap: true }
            }
            ClassifierKind::SvmLinear => ClassifierSpec::SvmLinear { c: 1.0, epochs: 200 },
        }
    }

    pub fn kind(&self) -> ClassifierKind {
        match self {
            ClassifierSpec::NaiveBayes { .. } => ClassifierKind::NaiveBayes,
            ClassifierSpec::Logistic { .. } => ClassifierKind::Logistic,
            ClassifierSpec::Nn1 { .. } => ClassifierKind::Nn1,
            ClassifierSpec::Tree { .. } => ClassifierKind::Tree,
            ClassifierSpec::Forest { .. } => ClassifierKind::Forest,
            ClassifierSpec::SvmLinear { .. } => ClassifierKind::SvmLinear,
        }
    }
}

/// A fitted model of any family.
#[derive(Debug, Clone, PartialEq)]
pub enum ClassifierModel {
    NaiveBayes(NaiveBayesModel),
    Logistic(LogisticModel),
    Nn1(Nn1Model),
    Tree(TreeModel),
    Forest(ForestModel),
    Svm(SvmModel),
}

/// Fit `spec` on `train`. The caller supplies the representation the family
/// expects (discretized for all but the nearest-neighbor model).
pub fn fit_classifier(
    train: &Dataset,
    spec: &ClassifierSpec,
    seed: u64,
) -> Result<ClassifierModel, ModelError> {
    Ok(match spec {
        ClassifierSpec::NaiveBayes { alpha } => {
            ClassifierModel::NaiveBayes(fit_naive_bayes(train, *alpha)?)
        }
        ClassifierSpec::Logistic { ridge, max_iter, tol } => {
            ClassifierModel::Logistic(fit_logistic(train, *ridge, *max_iter, *tol)?)
        }
        ClassifierSpec::Nn1 { normalize } => ClassifierModel::Nn1(fit_nn1(train, *normalize)?),
        ClassifierSpec::Tree { min_leaf, prune } => {
            ClassifierModel::Tree(fit_tree(train, *min_leaf, *prune)?)
        }
        ClassifierSpec::Forest { trees, feature_subset, bootstrap } => {
            ClassifierModel::Forest(fit_forest(train, *trees, *feature_subset, *bootstrap, seed)?)
        }
        ClassifierSpec::SvmLinear { c, epochs } => ClassifierModel::Svm(fit_svm(train, *c, *epochs)?),
    })
}

impl ClassifierModel {
    pub fn kind(&self) -> ClassifierKind {
        match self {
            ClassifierModel::NaiveBayes(_) => ClassifierKind::NaiveBayes,
            ClassifierModel::Logistic(_) => ClassifierKind::Logistic,
            ClassifierModel::Nn1(_) => ClassifierKind::Nn1,
            ClassifierModel::Tree(_) => ClassifierKind::Tree,
            ClassifierModel::Forest(_) => ClassifierKind::Forest,
            ClassifierModel::Svm(_) => ClassifierKind::SvmLinear,
        }
    }

    /// The feature list this model scores against.
    pub fn input_features(&self) -> &[FeatureDef] {
        match self {
            ClassifierModel::NaiveBayes(m) => &m.features,
            ClassifierModel::Logistic(m) => &m.features,
            ClassifierModel::Nn1(m) => &m.features,
            ClassifierModel::Tree(m) => &m.features,
            ClassifierModel::Forest(m) => &m.features,
            ClassifierModel::Svm(m) => &m.features,
        }
    }

    /// Common scoring contract: P(good | x) in [0, 1].
    pub fn score(&self, values: &[Value]) -> Result<f64, ModelError> {
        match self {
            ClassifierModel::NaiveBayes(m) => m.score(values),
            ClassifierModel::Logistic(m) => m.score(values),
            ClassifierModel::Nn1(m) => m.score(values),
            ClassifierModel::Tree(m) => m.score(values),
            ClassifierModel::Forest(m) => m.score(values),
            ClassifierModel::Svm(m) => m.score(values),
        }
    }
}

/// Arity/kind/domain check of a value row against a model's input features.
pub(crate) fn check_input(features: &[FeatureDef], values: &[Value]) -> Result<(), ModelError> {
    if values.len() != features.len() {
        return Err(ModelError::SchemaMismatch(format!(
            "expected {} values, got {}",
            features.len(),
            values.len()
        )));
    }
    for (f, v) in features.iter().zip(values) {
        match (&f.kind, v) {
            (_, Value::Missing) => {}
            (FeatureKind::Numeric, Value::Num(_)) => {}
            (FeatureKind::Nominal(domain), Value::Cat(c)) => {
                if *c as usize >= domain.len() {
                    return Err(ModelError::SchemaMismatch(format!(
                        "feature '{}': category index {} out of domain",
                        f.name, c
                    )));
                }
            }
            _ => {
                return Err(ModelError::SchemaMismatch(format!(
                    "feature '{}': value kind does not match",
                    f.name
                )))
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{Group, Instance, Label, Schema};

    fn nominal_train() -> Dataset {
        let schema = Schema::new(
            vec![FeatureDef {
                name: "f".into(),
                kind: FeatureKind::Nominal(vec!["A".into(), "B".into()]),
                group: Group::Form,
            }],
            "status",
            "good",
            "bad",
        )
        .unwrap();
        Dataset::new(
            schema,
            vec![
                Instance { values: vec![Value::Cat(0)], label: Label::Good },
                Instance { values: vec![Value::Cat(0)], label: Label::Good },
                Instance { values: vec![Value::Cat(1)], label: Label::Bad },
                Instance { values: vec![Value::Cat(1)], label: Label::Bad },
            ],
        )
        .unwrap()
    }

    #[test]
    fn every_family_scores_training_instances_in_unit_interval() {
        let train = nominal_train();
        for kind in ClassifierKind::ALL {
            let spec = match kind {
                // keep the forest small for the smoke test
                ClassifierKind::Forest => {
                    ClassifierSpec::Forest { trees: 10, feature_subset: None, bootstrap: true }
                }
                k => ClassifierSpec::default_for(k),
            };
            let model = fit_classifier(&train, &spec, 11).unwrap();
            for inst in train.instances() {
                let s = model.score(&inst.values).unwrap();
                assert!(
                    (0.0..=1.0).contains(&s) && s.is_finite(),
                    "{kind:?} scored {s}"
                );
            }
        }
    }

    #[test]
    fn arity_mismatch_is_reported() {
        let train = nominal_train();
        let model = fit_classifier(&train, &ClassifierSpec::default_for(ClassifierKind::NaiveBayes), 0)
            .unwrap();
        assert!(matches!(
            model.score(&[Value::Cat(0), Value::Cat(1)]),
            Err(ModelError::SchemaMismatch(_))
        ));
    }

    #[test]
    fn kind_round_trips_through_names() {
        for kind in ClassifierKind::ALL {
            assert_eq!(ClassifierKind::parse(kind.as_str()), Some(kind));
        }
        assert_eq!(ClassifierKind::parse("lda"), None);
    }
}
