//! Nearest-neighbor classifier (k = 1).
//!
//! Euclidean distance over numeric features (min-max normalized to [0,1]
//! when the normalization flag is set) plus 0/1 mismatch distance for
//! nominal features. The score is the nearest stored instance's label as a
//! degenerate probability; distance ties go to the earliest training index.

use crate::dataset::{Dataset, FeatureDef, FeatureKind, Label, Value};
use crate::error::ModelError;

#[derive(Debug, Clone, PartialEq)]
pub enum FeatureStats {
    /// Numeric range and mean in the encoded (possibly normalized) scale;
    /// missing values encode as the mean.
    Numeric { min: f64, max: f64, mean: f64 },
    Nominal,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Nn1Model {
    pub features: Vec<FeatureDef>,
    pub normalize: bool,
    pub stats: Vec<FeatureStats>,
    pub train_values: Vec<Vec<Value>>,
    pub train_labels: Vec<Label>,
}

pub fn fit_nn1(train: &Dataset, normalize: bool) -> Result<Nn1Model, ModelError> {
    if train.is_empty() {
        return Err(ModelError::EmptyTrainingData);
    }
    let (n_good, n_bad) = train.class_counts();
    if n_good == 0 || n_bad == 0 {
        return Err(ModelError::SingleClass);
    }
    let stats = train
        .schema()
        .features
        .iter()
        .enumerate()
        .map(|(i, f)| match f.kind {
            FeatureKind::Numeric => {
                let (values, _) = train.numeric_column(i);
                if values.is_empty() {
                    return FeatureStats::Numeric { min: 0.0, max: 0.0, mean: 0.0 };
                }
                let min = values.iter().copied().fold(f64::INFINITY, f64::min);
                let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let raw_mean = values.iter().sum::<f64>() / values.len() as f64;
                let mean = if normalize && max > min { (raw_mean - min) / (max - min) } else { raw_mean };
                FeatureStats::Numeric { min, max, mean }
            }
            FeatureKind::Nominal(_) => FeatureStats::Nominal,
        })
        .collect();
    Ok(Nn1Model {
        features: train.schema().features.clone(),
        normalize,
        stats,
        train_values: train.instances().iter().map(|i| i.values.clone()).collect(),
        train_labels: train.instances().iter().map(|i| i.label).collect(),
    })
}

impl Nn1Model {
    fn encode_numeric(&self, stat: &FeatureStats, v: &Value) -> f64 {
        let FeatureStats::Numeric { min, max, mean } = stat else {
            unreachable!("numeric stat for numeric feature");
        };
        match v {
            Value::Num(x) => {
                if self.normalize && max > min {
                    (x - min) / (max - min)
                } else {
                    *x
                }
            }
            _ => *mean,
        }
    }

    /// Squared distance between a test row and a stored row.
    fn sq_distance(&self, test: &[Value], stored: &[Value]) -> f64 {
        let mut acc = 0.0;
        for ((stat, a), b) in self.stats.iter().zip(test).zip(stored) {
            match stat {
                FeatureStats::Numeric { .. } => {
                    let d = self.encode_numeric(stat, a) - self.encode_numeric(stat, b);
                    acc += d * d;
                }
                FeatureStats::Nominal => {
                    if let (Value::Cat(x), Value::Cat(y)) = (a, b) {
                        if x != y {
                            acc += 1.0;
                        }
                    }
                    // any missing side contributes zero
                }
            }
        }
        acc
    }

    /// Index and distance of the nearest stored instance.
    pub fn nearest(&self, values: &[Value]) -> Result<(usize, f64), ModelError> {
        super::check_input(&self.features, values)?;
        let mut best = (0usize, f64::INFINITY);
        for (i, stored) in self.train_values.iter().enumerate() {
            let d = self.sq_distance(values, stored);
            if d < best.1 {
                best = (i, d);
            }
        }
        Ok((best.0, best.1.sqrt()))
    }

    pub fn score(&self, values: &[Value]) -> Result<f64, ModelError> {
        let (idx, _) = self.nearest(values)?;
        Ok(if self.train_labels[idx] == Label::Good { 1.0 } else { 0.0 })
    }
}
