//! Input encodings for the margin-based models.
//!
//! Logistic regression and the linear SVM consume a dense numeric vector:
//! numeric features are standardized to zero mean / unit variance, nominal
//! features are one-hot encoded with the first category dropped as the
//! reference bin. Missing values encode as zeros, which is the training mean
//! for standardized numerics and the reference bin for nominals.

use crate::dataset::{Dataset, FeatureKind, Value};

#[derive(Debug, Clone, PartialEq)]
pub enum EncodedFeature {
    /// Standardized numeric column; `sd == 0` collapses the column to 0.
    Numeric { mean: f64, sd: f64 },
    /// One-hot over `arity` categories, reference (first) bin dropped.
    Nominal { arity: usize },
}

impl EncodedFeature {
    fn width(&self) -> usize {
        match self {
            EncodedFeature::Numeric { .. } => 1,
            EncodedFeature::Nominal { arity } => arity - 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OneHotEncoder {
    pub columns: Vec<EncodedFeature>,
}

impl OneHotEncoder {
    pub fn fit(train: &Dataset) -> OneHotEncoder {
        let columns = train
            .schema()
            .features
            .iter()
            .enumerate()
            .map(|(i, f)| match &f.kind {
                FeatureKind::Numeric => {
                    let (values, _) = train.numeric_column(i);
                    let n = values.len() as f64;
                    let mean = if values.is_empty() { 0.0 } else { values.iter().sum::<f64>() / n };
                    let var = if values.is_empty() {
                        0.0
                    } else {
                        values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n
                    };
                    EncodedFeature::Numeric { mean, sd: var.sqrt() }
                }
                FeatureKind::Nominal(domain) => EncodedFeature::Nominal { arity: domain.len() },
            })
            .collect();
        OneHotEncoder { columns }
    }

    pub fn width(&self) -> usize {
        self.columns.iter().map(EncodedFeature::width).sum()
    }

    /// Encode a conformance-checked value row.
    pub fn encode(&self, values: &[Value]) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.width());
        for (col, value) in self.columns.iter().zip(values) {
            match col {
                EncodedFeature::Numeric { mean, sd } => out.push(match value {
                    Value::Num(v) if *sd > 0.0 => (v - mean) / sd,
                    _ => 0.0,
                }),
                EncodedFeature::Nominal { arity } => {
                    let hot = match value {
                        Value::Cat(c) => Some(*c as usize),
                        _ => None,
                    };
                    for bin in 1..*arity {
                        out.push(if hot == Some(bin) { 1.0 } else { 0.0 });
                    }
                }
            }
        }
        out
    }

    pub fn encode_dataset(&self, data: &Dataset) -> (Vec<Vec<f64>>, Vec<f64>) {
        let xs = data.instances().iter().map(|i| self.encode(&i.values)).collect();
        let ys = data
            .instances()
            .iter()
            .map(|i| if i.label == crate::dataset::Label::Good { 1.0 } else { 0.0 })
            .collect();
        (xs, ys)
    }
}
