//! Class-imbalance machinery: decision thresholds and SMOTE.
//!
//! The decision rule everywhere is "classify good iff score > t". The
//! F1-optimizing selector maximizes the bad-class F1 over all candidate
//! thresholds (with 98%+ goods, good-class F1 is maximized by accepting
//! everyone, which is useless); the cost rule converts a false-positive cost
//! ratio x into the minimum-expected-cost threshold x / (1 + x).

use rand::Rng;

use crate::dataset::{Dataset, FeatureKind, Instance, Label, Value};
use crate::error::ModelError;
use crate::seed::component_rng;

/// Misclassification costs: a false negative (good rejected) costs one
/// unit; a false positive (bad accepted) costs `fp_cost` units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostMatrix {
    pub fp_cost: f64,
}

impl CostMatrix {
    pub fn new(fp_cost: f64) -> Result<CostMatrix, ModelError> {
        if fp_cost <= 0.0 || !fp_cost.is_finite() {
            return Err(ModelError::BadCostRatio(fp_cost));
        }
        Ok(CostMatrix { fp_cost })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ThresholdProvenance {
    DefaultHalf,
    F1Optimized,
    CostRatio,
}

impl ThresholdProvenance {
    pub fn as_str(self) -> &'static str {
        match self {
            ThresholdProvenance::DefaultHalf => "default_half",
            ThresholdProvenance::F1Optimized => "f1_optimized",
            ThresholdProvenance::CostRatio => "cost_ratio",
        }
    }

    pub fn parse(s: &str) -> Option<ThresholdProvenance> {
        Some(match s {
            "default_half" => ThresholdProvenance::DefaultHalf,
            "f1_optimized" => ThresholdProvenance::F1Optimized,
            "cost_ratio" => ThresholdProvenance::CostRatio,
            _ => return None,
        })
    }
}

/// A decision threshold and where it came from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Threshold {
    pub t: f64,
    pub provenance: ThresholdProvenance,
}

impl Threshold {
    pub fn default_half() -> Threshold {
        Threshold { t: 0.5, provenance: ThresholdProvenance::DefaultHalf }
    }
}

/// Classify good iff `score > t`.
pub fn classify(score: f64, threshold: Threshold) -> Label {
    if score > threshold.t {
        Label::Good
    } else {
        Label::Bad
    }
}

/// Minimum-expected-cost threshold `x / (1 + x)` for cost ratio `x`.
pub fn cost_threshold(cost: CostMatrix) -> Threshold {
    Threshold {
        t: cost.fp_cost / (1.0 + cost.fp_cost),
        provenance: ThresholdProvenance::CostRatio,
    }
}

/// Bad-class F1 of the rule "good iff score > t". Thresholds with no
/// predicted bads compare as zero.
fn bad_class_f1(scored: &[(f64, Label)], t: f64) -> f64 {
    let mut predicted_bad = 0usize;
    let mut correct_bad = 0usize;
    let mut actual_bad = 0usize;
    for &(score, label) in scored {
        let is_bad = label == Label::Bad;
        actual_bad += is_bad as usize;
        if score <= t {
            predicted_bad += 1;
            correct_bad += is_bad as usize;
        }
    }
    if predicted_bad == 0 || actual_bad == 0 || correct_bad == 0 {
        return 0.0;
    }
    let p = correct_bad as f64 / predicted_bad as f64;
    let r = correct_bad as f64 / actual_bad as f64;
    2.0 * p * r / (p + r)
}

/// Candidate thresholds: 0, midpoints between adjacent distinct scores, 1.
fn candidate_thresholds(scored: &[(f64, Label)]) -> Vec<f64> {
    let mut scores: Vec<f64> = scored.iter().map(|(s, _)| *s).collect();
    scores.sort_by(|a, b| a.partial_cmp(b).unwrap());
    scores.dedup();
    let mut candidates = vec![0.0];
    candidates.extend(scores.windows(2).map(|w| (w[0] + w[1]) / 2.0));
    candidates.push(1.0);
    candidates
}

/// Threshold maximizing the bad-class F1; ties go to the larger threshold.
pub fn select_threshold_f1(scored: &[(f64, Label)]) -> Result<Threshold, ModelError> {
    let goods = scored.iter().filter(|(_, l)| *l == Label::Good).count();
    if goods == 0 || goods == scored.len() {
        return Err(ModelError::SingleClassScores);
    }
    let mut best_t = 0.0;
    let mut best_f1 = f64::NEG_INFINITY;
    for t in candidate_thresholds(scored) {
        let f1 = bad_class_f1(scored, t);
        if f1 >= best_f1 {
            best_f1 = f1;
            best_t = t;
        }
    }
    Ok(Threshold { t: best_t, provenance: ThresholdProvenance::F1Optimized })
}

/// SMOTE oversampling of the minority class.
///
/// For each minority instance, `percent/100` synthetics are generated by
/// picking one of its `k` minority nearest neighbors (Euclidean distance on
/// min-max-normalized numerics, 0/1 nominal mismatch) and interpolating
/// numerics uniformly at random on the joining segment. Nominal values copy
/// the pair's majority, which for two parents means the base on
/// disagreement; a missing parent coordinate yields a missing coordinate.
/// Synthetics are appended after the originals, which are never touched.
pub fn smote(dataset: &Dataset, percent: u32, k: usize, seed: u64) -> Result<Dataset, ModelError> {
    Ok(smote_with_provenance(dataset, percent, k, seed)?.0)
}

/// [`smote`], also returning each synthetic's parent pair as indices into
/// the minority subsequence, so audits can check interpolation bounds.
pub fn smote_with_provenance(
    dataset: &Dataset,
    percent: u32,
    k: usize,
    seed: u64,
) -> Result<(Dataset, Vec<(usize, usize)>), ModelError> {
    if percent % 100 != 0 {
        return Err(ModelError::BadSmotePercent(percent));
    }
    if percent == 0 {
        return Ok((dataset.clone(), Vec::new()));
    }
    let (n_good, n_bad) = dataset.class_counts();
    let minority = if n_bad <= n_good { Label::Bad } else { Label::Good };
    let minority_count = n_good.min(n_bad);
    if minority_count <= k {
        return Err(ModelError::MinorityTooSmall { minority: minority_count, k });
    }

    // Normalization ranges over the full dataset.
    let schema = dataset.schema();
    let ranges: Vec<Option<(f64, f64)>> = schema
        .features
        .iter()
        .enumerate()
        .map(|(i, f)| match f.kind {
            FeatureKind::Numeric => {
                let (values, _) = dataset.numeric_column(i);
                if values.is_empty() {
                    Some((0.0, 0.0))
                } else {
                    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
                    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                    Some((min, max))
                }
            }
            FeatureKind::Nominal(_) => None,
        })
        .collect();

    let minority_rows: Vec<&Instance> = dataset
        .instances()
        .iter()
        .filter(|i| i.label == minority)
        .collect();

    let distance = |a: &Instance, b: &Instance| -> f64 {
        let mut acc = 0.0;
        for (f, (&va, &vb)) in ranges.iter().zip(a.values.iter().zip(&b.values)) {
            match f {
                Some((min, max)) => {
                    let norm = |v: Value| match v {
                        Value::Num(x) if max > min => (x - min) / (max - min),
                        Value::Num(_) => 0.0,
                        _ => 0.5, // missing numeric sits mid-range
                    };
                    let d = norm(va) - norm(vb);
                    acc += d * d;
                }
                None => {
                    if let (Value::Cat(x), Value::Cat(y)) = (va, vb) {
                        if x != y {
                            acc += 1.0;
                        }
                    }
                }
            }
        }
        acc
    };

    // k nearest minority neighbors per minority instance (excluding itself;
    // ties by earliest index).
    let neighbors: Vec<Vec<usize>> = minority_rows
        .iter()
        .enumerate()
        .map(|(i, base)| {
            let mut dists: Vec<(usize, f64)> = minority_rows
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(j, other)| (j, distance(base, other)))
                .collect();
            dists.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap().then(a.0.cmp(&b.0)));
            dists.into_iter().take(k).map(|(j, _)| j).collect()
        })
        .collect();

    let per_instance = (percent / 100) as usize;
    let mut rng = component_rng(seed, "smote", 0);
    let mut synthetics = Vec::with_capacity(per_instance * minority_rows.len());
    let mut provenance = Vec::with_capacity(synthetics.capacity());
    for (i, base) in minority_rows.iter().enumerate() {
        for _ in 0..per_instance {
            let neighbor_idx = neighbors[i][rng.gen_range(0..neighbors[i].len())];
            let neighbor = minority_rows[neighbor_idx];
            let gap: f64 = rng.gen_range(0.0..1.0);
            let values = base
                .values
                .iter()
                .zip(&neighbor.values)
                .map(|(&vb, &vn)| match (vb, vn) {
                    (Value::Num(a), Value::Num(b)) => Value::Num(a + gap * (b - a)),
                    (Value::Cat(a), Value::Cat(b)) if a == b => Value::Cat(a),
                    (Value::Cat(a), Value::Cat(_)) => Value::Cat(a), // pair tie: base wins
                    _ => Value::Missing,
                })
                .collect();
            synthetics.push(Instance { values, label: minority });
            provenance.push((i, neighbor_idx));
        }
    }

    let result = dataset.with_instances(synthetics)?;
    Ok((result, provenance))
}
