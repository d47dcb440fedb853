//! Naive Bayes over discretized (nominal) inputs.
//!
//! Priors and per-bin conditionals are Laplace-smoothed relative
//! frequencies; the posterior multiplies the class prior by each feature's
//! conditional and normalizes so the two class posteriors sum to one.
//! Missing values contribute no factor.

use crate::dataset::{Dataset, FeatureDef, Label, Value};
use crate::error::ModelError;

#[derive(Debug, Clone, PartialEq)]
pub struct NaiveBayesModel {
    pub features: Vec<FeatureDef>,
    pub alpha: f64,
    pub prior_good: f64,
    pub prior_bad: f64,
    /// Per feature: `[P(bin|good), P(bin|bad)]`, each row summing to 1.
    pub cond: Vec<[Vec<f64>; 2]>,
}

pub fn fit_naive_bayes(train: &Dataset, alpha: f64) -> Result<NaiveBayesModel, ModelError> {
    if alpha <= 0.0 {
        return Err(ModelError::InvalidHyperparameter(format!("alpha must be positive, got {alpha}")));
    }
    for f in &train.schema().features {
        if f.kind.is_numeric() {
            return Err(ModelError::NotDiscretized(f.name.clone()));
        }
    }
    let (n_good, n_bad) = train.class_counts();
    if train.is_empty() {
        return Err(ModelError::EmptyTrainingData);
    }
    if n_good == 0 || n_bad == 0 {
        return Err(ModelError::SingleClass);
    }

    let n = (n_good + n_bad) as f64;
    let prior_good = (n_good as f64 + alpha) / (n + 2.0 * alpha);
    let prior_bad = (n_bad as f64 + alpha) / (n + 2.0 * alpha);

    let mut cond = Vec::with_capacity(train.schema().features.len());
    for (i, f) in train.schema().features.iter().enumerate() {
        let bins = f.kind.domain().unwrap().len();
        let mut counts = [vec![0usize; bins], vec![0usize; bins]];
        let mut known = [0usize; 2];
        for inst in train.instances() {
            if let Value::Cat(b) = inst.values[i] {
                let c = (inst.label == Label::Bad) as usize;
                counts[c][b as usize] += 1;
                known[c] += 1;
            }
        }
        let rows: [Vec<f64>; 2] = [0, 1].map(|c| {
            let denom = known[c] as f64 + alpha * bins as f64;
            counts[c].iter().map(|&k| (k as f64 + alpha) / denom).collect()
        });
        cond.push(rows);
    }

    Ok(NaiveBayesModel {
        features: train.schema().features.clone(),
        alpha,
        prior_good,
        prior_bad,
        cond,
    })
}

impl NaiveBayesModel {
    /// Assemble a model from explicit parameters (persistence, hand-built
    /// models). Validates shapes, prior normalization, and row sums.
    pub fn from_parts(
        features: Vec<FeatureDef>,
        alpha: f64,
        prior_good: f64,
        cond: Vec<[Vec<f64>; 2]>,
    ) -> Result<NaiveBayesModel, ModelError> {
        if cond.len() != features.len() {
            return Err(ModelError::SchemaMismatch(
                "conditional table count differs from feature count".into(),
            ));
        }
        if !(0.0..=1.0).contains(&prior_good) {
            return Err(ModelError::InvalidHyperparameter(format!("prior {prior_good} outside [0,1]")));
        }
        for (f, rows) in features.iter().zip(&cond) {
            let bins = f
                .kind
                .domain()
                .ok_or_else(|| ModelError::NotDiscretized(f.name.clone()))?
                .len();
            for row in rows {
                if row.len() != bins {
                    return Err(ModelError::SchemaMismatch(format!(
                        "feature '{}': conditional row has {} bins, domain has {}",
                        f.name,
                        row.len(),
                        bins
                    )));
                }
                let sum: f64 = row.iter().sum();
                if (sum - 1.0).abs() > 1e-9 {
                    return Err(ModelError::SchemaMismatch(format!(
                        "feature '{}': conditional row sums to {sum}, not 1",
                        f.name
                    )));
                }
            }
        }
        Ok(NaiveBayesModel { features, alpha, prior_good, prior_bad: 1.0 - prior_good, cond })
    }

    /// `(P(good|x), P(bad|x))`, normalized to sum to one.
    pub fn posterior(&self, values: &[Value]) -> Result<(f64, f64), ModelError> {
        super::check_input(&self.features, values)?;
        let mut like_good = self.prior_good;
        let mut like_bad = self.prior_bad;
        for (f, v) in self.cond.iter().zip(values) {
            if let Value::Cat(b) = v {
                like_good *= f[0][*b as usize];
                like_bad *= f[1][*b as usize];
            }
        }
        let total = like_good + like_bad;
        Ok((like_good / total, like_bad / total))
    }

    pub fn score(&self, values: &[Value]) -> Result<f64, ModelError> {
        Ok(self.posterior(values)?.0)
    }
}
