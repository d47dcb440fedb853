//! Stratified fold assignment.
//!
//! Each class is shuffled independently with a seed-derived permutation and
//! dealt round-robin over the folds, so per-class fold sizes differ by at
//! most one and the assignment is a pure function of (dataset, k, seed).

use rand::seq::SliceRandom;

use crate::dataset::{Dataset, Label};
use crate::error::DataError;
use crate::seed::component_rng;

/// Per-instance fold indices in `[0, k)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldAssignment {
    pub k: usize,
    pub assignment: Vec<usize>,
}

pub fn stratified_folds(
    dataset: &Dataset,
    k: usize,
    seed: u64,
) -> Result<FoldAssignment, DataError> {
    if k < 2 {
        return Err(DataError::TooFewFolds(k));
    }
    let (n_good, n_bad) = dataset.class_counts();
    for (count, label) in [(n_good, Label::Good), (n_bad, Label::Bad)] {
        if count < k {
            return Err(DataError::ClassSmallerThanFolds {
                k,
                size: count,
                class: dataset.schema().label_text(label).to_string(),
            });
        }
    }

    let mut assignment = vec![0usize; dataset.len()];
    for (stream, label) in [(0u64, Label::Good), (1u64, Label::Bad)] {
        let mut indices: Vec<usize> = dataset
            .instances()
            .iter()
            .enumerate()
            .filter(|(_, inst)| inst.label == label)
            .map(|(i, _)| i)
            .collect();
        let mut rng = component_rng(seed, "stratified-folds", stream);
        indices.shuffle(&mut rng);
        for (pos, idx) in indices.into_iter().enumerate() {
            assignment[idx] = pos % k;
        }
    }
    Ok(FoldAssignment { k, assignment })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{FeatureDef, FeatureKind, Group, Instance, Schema, Value};

    fn dataset(n_good: usize, n_bad: usize) -> Dataset {
        let schema = Schema::new(
            vec![FeatureDef {
                name: "x".into(),
                kind: FeatureKind::Numeric,
                group: Group::Form,
            }],
            "status",
            "good",
            "bad",
        )
        .unwrap();
        let mut instances = Vec::new();
        for i in 0..n_good {
            instances.push(Instance { values: vec![Value::Num(i as f64)], label: Label::Good });
        }
        for i in 0..n_bad {
            instances.push(Instance { values: vec![Value::Num(i as f64)], label: Label::Bad });
        }
        Dataset::new(schema, instances).unwrap()
    }

    fn class_fold_counts(d: &Dataset, fa: &FoldAssignment) -> (Vec<usize>, Vec<usize>) {
        let mut good = vec![0usize; fa.k];
        let mut bad = vec![0usize; fa.k];
        for (inst, &f) in d.instances().iter().zip(&fa.assignment) {
            match inst.label {
                Label::Good => good[f] += 1,
                Label::Bad => bad[f] += 1,
            }
        }
        (good, bad)
    }

    #[test]
    fn exact_divisibility_gives_equal_folds() {
        let d = dataset(10, 10);
        let fa = stratified_folds(&d, 2, 1).unwrap();
        let (good, bad) = class_fold_counts(&d, &fa);
        assert_eq!(good, vec![5, 5]);
        assert_eq!(bad, vec![5, 5]);
    }

    #[test]
    fn paper_scale_bad_counts_per_fold() {
        // 121 = 12 * 10 + 1, so bad counts per fold are 12 or 13.
        let d = dataset(7401, 121);
        let fa = stratified_folds(&d, 10, 3).unwrap();
        let (_, bad) = class_fold_counts(&d, &fa);
        assert!(bad.iter().all(|&c| c == 12 || c == 13), "{bad:?}");
        assert_eq!(bad.iter().sum::<usize>(), 121);
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let d = dataset(23, 9);
        let a = stratified_folds(&d, 3, 42).unwrap();
        let b = stratified_folds(&d, 3, 42).unwrap();
        assert_eq!(a, b);
        let c = stratified_folds(&d, 3, 43).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn class_smaller_than_k_is_an_error() {
        let d = dataset(10, 2);
        assert!(matches!(
            stratified_folds(&d, 3, 0),
            Err(DataError::ClassSmallerThanFolds { .. })
        ));
    }

    #[test]
    fn stratification_bound_holds_on_awkward_sizes() {
        for (g, b, k) in [(17, 5, 5), (23, 7, 4), (100, 13, 10)] {
            let d = dataset(g, b);
            let fa = stratified_folds(&d, k, 9).unwrap();
            let (good, bad) = class_fold_counts(&d, &fa);
            for counts in [good, bad] {
                let max = counts.iter().max().unwrap();
                let min = counts.iter().min().unwrap();
                assert!(max - min <= 1, "unbalanced: {counts:?}");
            }
        }
    }
}
