//! Entropy-based multi-interval discretization (MDLP).
//!
//! Numeric features are cut recursively at the boundary midpoint that
//! minimizes the weighted child class entropy; a cut is kept only when the
//! information gain clears the minimum-description-length acceptance bound
//!
//! ```text
//! Gain(S,T) > log2(N-1)/N + Delta/N
//! Delta     = log2(3^k - 2) - [k*Ent(S) - k1*Ent(S1) - k2*Ent(S2)]
//! ```
//!
//! with `k`, `k1`, `k2` the number of classes present in `S`, `S1`, `S2`.
//! Candidate cuts are midpoints between consecutive distinct values whose
//! label multisets differ; ties in gain go to the leftmost cut. Bins are
//! left-open/right-closed, so `value <= cut` is the membership test.

use crate::dataset::{Dataset, FeatureDef, FeatureKind, Instance, Label, Schema, Value};
use crate::error::ModelError;

/// Shannon class entropy of a count vector, in bits. `0 log 0` is 0.
pub fn entropy(counts: &[usize]) -> Result<f64, ModelError> {
    let total: usize = counts.iter().sum();
    if total == 0 {
        return Err(ModelError::AllZeroCounts);
    }
    let n = total as f64;
    let mut bits = 0.0;
    for &c in counts {
        if c > 0 {
            let p = c as f64 / n;
            bits -= p * p.log2();
        }
    }
    Ok(bits)
}

fn entropy2(good: usize, bad: usize) -> f64 {
    entropy(&[good, bad]).unwrap_or(0.0)
}

fn classes_present(good: usize, bad: usize) -> u32 {
    (good > 0) as u32 + (bad > 0) as u32
}

/// A run of equal values in the sorted column.
#[derive(Debug, Clone, Copy)]
struct ValueRun {
    value: f64,
    good: usize,
    bad: usize,
}

fn value_runs(values: &[f64], labels: &[Label]) -> Vec<ValueRun> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap());
    let mut runs: Vec<ValueRun> = Vec::new();
    for i in order {
        let (v, l) = (values[i], labels[i]);
        match runs.last_mut() {
            Some(run) if run.value == v => match l {
                Label::Good => run.good += 1,
                Label::Bad => run.bad += 1,
            },
            _ => runs.push(ValueRun {
                value: v,
                good: (l == Label::Good) as usize,
                bad: (l == Label::Bad) as usize,
            }),
        }
    }
    runs
}

/// Fit MDLP cut points for one numeric column. The caller excludes missing
/// values. An empty result (no accepted cuts) is valid.
pub fn fit_cut_points(values: &[f64], labels: &[Label]) -> Vec<f64> {
    assert_eq!(values.len(), labels.len(), "values and labels must align");
    let runs = value_runs(values, labels);
    let mut cuts = Vec::new();
    if !runs.is_empty() {
        split_recursive(&runs, &mut cuts);
    }
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    cuts
}

/// Recurse over a contiguous slice of value runs, appending accepted cuts.
fn split_recursive(runs: &[ValueRun], cuts: &mut Vec<f64>) {
    let total_good: usize = runs.iter().map(|r| r.good).sum();
    let total_bad: usize = runs.iter().map(|r| r.bad).sum();
    let n = (total_good + total_bad) as f64;
    let ent_s = entropy2(total_good, total_bad);

    // Scan boundaries between adjacent runs; the cut between run i and i+1
    // splits the whole slice at that point. Strict `>` keeps the leftmost
    // maximum on ties.
    let mut best: Option<(usize, f64, f64, f64)> = None;
    let mut prefix_good = 0usize;
    let mut prefix_bad = 0usize;
    for i in 0..runs.len().saturating_sub(1) {
        prefix_good += runs[i].good;
        prefix_bad += runs[i].bad;
        if !boundary_between(&runs[i], &runs[i + 1]) {
            continue;
        }
        let (g1, b1) = (prefix_good, prefix_bad);
        let (g2, b2) = (total_good - g1, total_bad - b1);
        let ent1 = entropy2(g1, b1);
        let ent2 = entropy2(g2, b2);
        let gain =
            ent_s - ((g1 + b1) as f64 / n) * ent1 - ((g2 + b2) as f64 / n) * ent2;
        if best.map_or(true, |(_, g, ..)| gain > g) {
            best = Some((i, gain, ent1, ent2));
        }
    }

    let Some((i, gain, ent1, ent2)) = best else { return };

    let k = classes_present(total_good, total_bad);
    let prefix: (usize, usize) = runs[..=i].iter().fold((0, 0), |(g, b), r| (g + r.good, b + r.bad));
    let k1 = classes_present(prefix.0, prefix.1);
    let k2 = classes_present(total_good - prefix.0, total_bad - prefix.1);
    if !mdlp_accepts(gain, ent_s, ent1, ent2, n, k, k1, k2) {
        return;
    }

    cuts.push((runs[i].value + runs[i + 1].value) / 2.0);
    split_recursive(&runs[..=i], cuts);
    split_recursive(&runs[i + 1..], cuts);
}

/// Two adjacent runs form a candidate boundary when their label multisets
/// differ.
fn boundary_between(a: &ValueRun, b: &ValueRun) -> bool {
    a.good != b.good || a.bad != b.bad
}

fn mdlp_accepts(gain: f64, ent_s: f64, ent1: f64, ent2: f64, n: f64, k: u32, k1: u32, k2: u32) -> bool {
    let delta = (3f64.powi(k as i32) - 2.0).log2()
        - (k as f64 * ent_s - k1 as f64 * ent1 - k2 as f64 * ent2);
    gain > (n - 1.0).log2() / n + delta / n
}

/// Per-feature fitted cut points. Nominal features carry no entry.
#[derive(Debug, Clone, PartialEq)]
pub struct CutPointModel {
    /// Parallel to the schema's features; `None` for nominal features.
    pub cuts: Vec<Option<Vec<f64>>>,
    /// Source schema feature names, for mismatch checks.
    pub feature_names: Vec<String>,
}

impl CutPointModel {
    /// Fit cuts for every numeric feature of `train`. Features whose
    /// training values are all missing get an empty cut list.
    pub fn fit(train: &Dataset) -> CutPointModel {
        let schema = train.schema();
        let mut cuts = Vec::with_capacity(schema.features.len());
        for (i, f) in schema.features.iter().enumerate() {
            match f.kind {
                FeatureKind::Numeric => {
                    let (values, labels) = train.numeric_column(i);
                    cuts.push(Some(fit_cut_points(&values, &labels)));
                }
                FeatureKind::Nominal(_) => cuts.push(None),
            }
        }
        CutPointModel {
            cuts,
            feature_names: schema.features.iter().map(|f| f.name.clone()).collect(),
        }
    }

    pub fn cuts_for(&self, feature: usize) -> Option<&[f64]> {
        self.cuts.get(feature).and_then(|c| c.as_deref())
    }

    fn check_covers(&self, schema: &Schema) -> Result<(), ModelError> {
        if self.feature_names.len() != schema.features.len() {
            return Err(ModelError::CutModelMismatch(format!(
                "model has {} features, schema has {}",
                self.feature_names.len(),
                schema.features.len()
            )));
        }
        for (i, f) in schema.features.iter().enumerate() {
            if self.feature_names[i] != f.name {
                return Err(ModelError::CutModelMismatch(f.name.clone()));
            }
            if f.kind.is_numeric() && self.cuts[i].is_none() {
                return Err(ModelError::CutModelMismatch(f.name.clone()));
            }
        }
        Ok(())
    }
}

/// Bin index of `v` for sorted cuts: the number of cuts strictly below `v`,
/// i.e. `v <= cuts[i]` places `v` in bin `i`.
pub fn bin_index(cuts: &[f64], v: f64) -> usize {
    cuts.partition_point(|&c| v > c)
}

/// Bin labels `(-inf,c1], (c1,c2], ..., (ck,+inf)`; a cutless feature gets
/// the single bin `all`. Cut values render with round-trip-exact decimals.
pub fn bin_labels(cuts: &[f64]) -> Vec<String> {
    if cuts.is_empty() {
        return vec!["all".to_string()];
    }
    let mut labels = Vec::with_capacity(cuts.len() + 1);
    labels.push(format!("(-inf,{}]", cuts[0]));
    for w in cuts.windows(2) {
        labels.push(format!("({},{}]", w[0], w[1]));
    }
    labels.push(format!("({},+inf)", cuts[cuts.len() - 1]));
    labels
}

/// Replace every numeric feature with the nominal binning fitted in `model`.
/// Missing values stay missing; nominal features pass through.
pub fn apply_discretization(dataset: &Dataset, model: &CutPointModel) -> Result<Dataset, ModelError> {
    let schema = dataset.schema();
    model.check_covers(schema)?;

    let features: Vec<FeatureDef> = schema
        .features
        .iter()
        .enumerate()
        .map(|(i, f)| match &f.kind {
            FeatureKind::Numeric => FeatureDef {
                name: f.name.clone(),
                kind: FeatureKind::Nominal(bin_labels(model.cuts_for(i).unwrap())),
                group: f.group,
            },
            FeatureKind::Nominal(_) => f.clone(),
        })
        .collect();
    let new_schema = Schema::new(
        features,
        schema.class_name.clone(),
        schema.positive_label.clone(),
        schema.negative_label.clone(),
    )
    .map_err(|e| ModelError::CutModelMismatch(e.to_string()))?;

    let instances: Vec<Instance> = dataset
        .instances()
        .iter()
        .map(|inst| Instance {
            values: inst
                .values
                .iter()
                .enumerate()
                .map(|(i, v)| match (v, model.cuts_for(i)) {
                    (Value::Num(x), Some(cuts)) => Value::Cat(bin_index(cuts, *x) as u32),
                    (other, _) => *other,
                })
                .collect(),
            label: inst.label,
        })
        .collect();

    Dataset::new(new_schema, instances).map_err(|e| ModelError::CutModelMismatch(e.to_string()))
}
