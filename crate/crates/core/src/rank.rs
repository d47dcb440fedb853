//! Filter feature ranking and the leakage-free modelling pipeline.
//!
//! Features are ranked on the discretized training data by the chi-squared
//! statistic or information gain with respect to the class; the pipeline
//! fits cut points, ranking, classifier, and decision threshold strictly
//! from training data, so held-out instances can never influence any fitted
//! component.

use std::io::Write;

use crate::classifiers::{fit_classifier, ClassifierModel, ClassifierSpec};
use crate::dataset::{stratified_folds, Dataset, Label, Schema, Value};
use crate::discretize::{apply_discretization, bin_index, CutPointModel};
use crate::error::{DataError, ModelError};
use crate::imbalance::{cost_threshold, select_threshold_f1, CostMatrix, Threshold};
use crate::seed::derive_seed;

/// Ranking statistic.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RankMetric {
    Chi2,
    InfoGain,
}

impl RankMetric {
    pub fn as_str(self) -> &'static str {
        match self {
            RankMetric::Chi2 => "chi2",
            RankMetric::InfoGain => "infogain",
        }
    }

    pub fn parse(s: &str) -> Option<RankMetric> {
        match s {
            "chi2" => Some(RankMetric::Chi2),
            "infogain" => Some(RankMetric::InfoGain),
            _ => None,
        }
    }
}

/// bin x class contingency counts for one nominal feature, missing values
/// excluded (or pooled into an extra bin when `missing_as_bin` is set).
fn contingency(
    dataset: &Dataset,
    feature: usize,
    missing_as_bin: bool,
) -> Result<Vec<(usize, usize)>, ModelError> {
    let f = &dataset.schema().features[feature];
    let Some(domain) = f.kind.domain() else {
        return Err(ModelError::NotDiscretized(f.name.clone()));
    };
    let mut rows = vec![(0usize, 0usize); domain.len() + usize::from(missing_as_bin)];
    for inst in dataset.instances() {
        let row = match inst.values[feature] {
            Value::Cat(b) => b as usize,
            Value::Missing if missing_as_bin => domain.len(),
            _ => continue,
        };
        match inst.label {
            Label::Good => rows[row].0 += 1,
            Label::Bad => rows[row].1 += 1,
        }
    }
    Ok(rows)
}

fn chi_squared_of_table(rows: &[(usize, usize)]) -> f64 {
    let good: usize = rows.iter().map(|r| r.0).sum();
    let bad: usize = rows.iter().map(|r| r.1).sum();
    let n = (good + bad) as f64;
    if n == 0.0 {
        return 0.0;
    }
    let mut stat = 0.0;
    for &(g, b) in rows {
        let row_total = (g + b) as f64;
        for (observed, col_total) in [(g as f64, good as f64), (b as f64, bad as f64)] {
            let expected = row_total * col_total / n;
            if expected > 0.0 {
                stat += (observed - expected) * (observed - expected) / expected;
            }
        }
    }
    stat
}

fn info_gain_of_table(rows: &[(usize, usize)]) -> f64 {
    let good: usize = rows.iter().map(|r| r.0).sum();
    let bad: usize = rows.iter().map(|r| r.1).sum();
    let n = (good + bad) as f64;
    if n == 0.0 {
        return 0.0;
    }
    let h = |g: usize, b: usize| -> f64 {
        let total = (g + b) as f64;
        let mut bits = 0.0;
        for c in [g, b] {
            if c > 0 {
                let p = c as f64 / total;
                bits -= p * p.log2();
            }
        }
        bits
    };
    let mut conditional = 0.0;
    for &(g, b) in rows {
        if g + b > 0 {
            conditional += ((g + b) as f64 / n) * h(g, b);
        }
    }
    h(good, bad) - conditional
}

/// Pearson chi-squared of a nominal feature against the class.
pub fn chi_squared(dataset: &Dataset, feature: &str) -> Result<f64, ModelError> {
    chi_squared_with_options(dataset, feature, false)
}

pub fn chi_squared_with_options(
    dataset: &Dataset,
    feature: &str,
    missing_as_bin: bool,
) -> Result<f64, ModelError> {
    let idx = dataset
        .schema()
        .feature_index(feature)
        .ok_or_else(|| DataError::UnknownFeature(feature.to_string()))?;
    Ok(chi_squared_of_table(&contingency(dataset, idx, missing_as_bin)?))
}

/// Information gain (bits) of a nominal feature with respect to the class.
pub fn info_gain(dataset: &Dataset, feature: &str) -> Result<f64, ModelError> {
    info_gain_with_options(dataset, feature, false)
}

pub fn info_gain_with_options(
    dataset: &Dataset,
    feature: &str,
    missing_as_bin: bool,
) -> Result<f64, ModelError> {
    let idx = dataset
        .schema()
        .feature_index(feature)
        .ok_or_else(|| DataError::UnknownFeature(feature.to_string()))?;
    Ok(info_gain_of_table(&contingency(dataset, idx, missing_as_bin)?))
}

/// One ranked feature.
#[derive(Debug, Clone, PartialEq)]
pub struct RankEntry {
    /// Index into the source schema.
    pub index: usize,
    pub feature: String,
    pub statistic: f64,
}

/// Complete descending ranking; ties keep schema order.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureRanking {
    pub metric: RankMetric,
    pub entries: Vec<RankEntry>,
}

/// Rank every feature of a discretized dataset, descending by statistic.
pub fn rank_features(dataset: &Dataset, metric: RankMetric) -> Result<FeatureRanking, ModelError> {
    let mut entries = Vec::with_capacity(dataset.schema().features.len());
    for (index, f) in dataset.schema().features.iter().enumerate() {
        let table = contingency(dataset, index, false)?;
        let statistic = match metric {
            RankMetric::Chi2 => chi_squared_of_table(&table),
            RankMetric::InfoGain => info_gain_of_table(&table),
        };
        entries.push(RankEntry { index, feature: f.name.clone(), statistic });
    }
    // stable sort preserves schema order on exact ties
    entries.sort_by(|a, b| b.statistic.partial_cmp(&a.statistic).unwrap());
    Ok(FeatureRanking { metric, entries })
}

/// Table-3-shaped CSV: `rank,feature,group,statistic`.
pub fn write_ranking_csv<W: Write>(
    mut writer: W,
    ranking: &FeatureRanking,
    schema: &Schema,
) -> Result<(), ModelError> {
    writeln!(writer, "rank,feature,group,statistic")?;
    for (i, e) in ranking.entries.iter().enumerate() {
        writeln!(
            writer,
            "{},{},{},{}",
            i + 1,
            e.feature,
            schema.features[e.index].group.as_str(),
            e.statistic
        )?;
    }
    Ok(())
}

/// How the fitted pipeline picks its decision threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ThresholdMode {
    DefaultHalf,
    /// Out-of-fold F1 optimization on an internal 3-fold split of train.
    F1Optimized,
    CostRatio(f64),
}

/// Everything needed to fit one pipeline.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineSpec {
    pub metric: RankMetric,
    /// Number of top-ranked features to keep.
    pub n_features: usize,
    pub classifier: ClassifierSpec,
    pub threshold_mode: ThresholdMode,
}

/// Discretizer + selected features + classifier + threshold, all fitted from
/// the same training data.
#[derive(Debug, Clone, PartialEq)]
pub struct FittedPipeline {
    /// The raw (pre-discretization) schema instances must conform to.
    pub schema: Schema,
    pub cuts: CutPointModel,
    /// Schema indices of the selected features, in ranking order.
    pub selected: Vec<usize>,
    pub classifier: ClassifierModel,
    pub threshold: Threshold,
}

const THRESHOLD_FOLDS: usize = 3;

fn fit_components(
    train: &Dataset,
    spec: &PipelineSpec,
    seed: u64,
) -> Result<(CutPointModel, Vec<usize>, ClassifierModel), ModelError> {
    let m = train.schema().features.len();
    if spec.n_features == 0 || spec.n_features > m {
        return Err(ModelError::BadFeatureCount { got: spec.n_features, max: m });
    }
    let (n_good, n_bad) = train.class_counts();
    if n_good == 0 || n_bad == 0 {
        return Err(ModelError::SingleClass);
    }

    let cuts = CutPointModel::fit(train);
    let binned = apply_discretization(train, &cuts)?;
    let ranking = rank_features(&binned, spec.metric)?;
    let selected: Vec<usize> =
        ranking.entries[..spec.n_features].iter().map(|e| e.index).collect();

    let classifier_train = if spec.classifier.kind().wants_discretized() {
        binned.project(&selected)
    } else {
        train.project(&selected)
    };
    let classifier = fit_classifier(&classifier_train, &spec.classifier, derive_seed(seed, "classifier", 0))?;
    Ok((cuts, selected, classifier))
}

/// Fit the full pipeline on `train`. A pure function of
/// `(train, spec, seed)`: no statistic of any other data influences any
/// component.
pub fn fit_pipeline(
    train: &Dataset,
    spec: &PipelineSpec,
    seed: u64,
) -> Result<FittedPipeline, ModelError> {
    let (cuts, selected, classifier) = fit_components(train, spec, seed)?;

    let threshold = match spec.threshold_mode {
        ThresholdMode::DefaultHalf => Threshold::default_half(),
        ThresholdMode::CostRatio(x) => cost_threshold(CostMatrix::new(x)?),
        ThresholdMode::F1Optimized => {
            // Out-of-fold scores from an internal split; resubstitution
            // scores would overfit the threshold.
            let folds = stratified_folds(train, THRESHOLD_FOLDS, derive_seed(seed, "threshold-folds", 0))?;
            let mut scored = Vec::with_capacity(train.len());
            for fold in 0..THRESHOLD_FOLDS {
                let (sub_train, held_out) = train.split_fold(&folds, fold);
                let (sub_cuts, sub_selected, sub_classifier) =
                    fit_components(&sub_train, spec, derive_seed(seed, "threshold-fit", fold as u64))?;
                let sub = FittedPipeline {
                    schema: train.schema().clone(),
                    cuts: sub_cuts,
                    selected: sub_selected,
                    classifier: sub_classifier,
                    threshold: Threshold::default_half(),
                };
                for inst in held_out.instances() {
                    scored.push((sub.score(&inst.values)?, inst.label));
                }
            }
            select_threshold_f1(&scored)?
        }
    };

    Ok(FittedPipeline {
        schema: train.schema().clone(),
        cuts,
        selected,
        classifier,
        threshold,
    })
}

impl FittedPipeline {
    /// P(good | x) for an instance over the raw schema.
    pub fn score(&self, values: &[Value]) -> Result<f64, ModelError> {
        if values.len() != self.schema.features.len() {
            return Err(ModelError::SchemaMismatch(format!(
                "expected {} values, got {}",
                self.schema.features.len(),
                values.len()
            )));
        }
        let projected: Vec<Value> = if self.classifier.kind().wants_discretized() {
            self.selected
                .iter()
                .map(|&i| match (values[i], self.cuts.cuts_for(i)) {
                    (Value::Num(x), Some(cuts)) => Ok(Value::Cat(bin_index(cuts, x) as u32)),
                    (Value::Num(_), None) => Err(ModelError::SchemaMismatch(format!(
                        "feature '{}' has no fitted cut points",
                        self.schema.features[i].name
                    ))),
                    (v, _) => Ok(v),
                })
                .collect::<Result<_, _>>()?
        } else {
            self.selected.iter().map(|&i| values[i]).collect()
        };
        self.classifier.score(&projected)
    }

    /// Apply the fitted threshold to the pipeline score.
    pub fn classify(&self, values: &[Value]) -> Result<Label, ModelError> {
        Ok(crate::imbalance::classify(self.score(values)?, self.threshold))
    }

    /// Names of the selected features, in ranking order.
    pub fn selected_names(&self) -> Vec<&str> {
        self.selected.iter().map(|&i| self.schema.features[i].name.as_str()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifiers::ClassifierKind;
    use crate::dataset::{FeatureDef, FeatureKind, Group, Instance};
    use proptest::prelude::*;

    /// One nominal feature with the worked 2x2 table:
    /// bin A holds (30 good, 10 bad), bin B (20 good, 40 bad).
    fn worked_table() -> Dataset {
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
        let mut instances = Vec::new();
        for (bin, good, bad) in [(0u32, 30, 10), (1u32, 20, 40)] {
            for _ in 0..good {
                instances.push(Instance { values: vec![Value::Cat(bin)], label: Label::Good });
            }
            for _ in 0..bad {
                instances.push(Instance { values: vec![Value::Cat(bin)], label: Label::Bad });
            }
        }
        Dataset::new(schema, instances).unwrap()
    }

    #[test]
    fn chi_squared_hand_value() {
        let d = worked_table();
        let stat = chi_squared(&d, "f").unwrap();
        assert!((stat - 16.667).abs() < 1e-3, "{stat}");
    }

    #[test]
    fn info_gain_hand_value() {
        let d = worked_table();
        let bits = info_gain(&d, "f").unwrap();
        assert!((bits - 0.1245).abs() < 1e-3, "{bits}");
    }

    #[test]
    fn independent_feature_scores_zero() {
        // identical class proportions in both bins
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
        let mut instances = Vec::new();
        for bin in [0u32, 1u32] {
            for _ in 0..6 {
                instances.push(Instance { values: vec![Value::Cat(bin)], label: Label::Good });
            }
            for _ in 0..2 {
                instances.push(Instance { values: vec![Value::Cat(bin)], label: Label::Bad });
            }
        }
        let d = Dataset::new(schema, instances).unwrap();
        assert!(chi_squared(&d, "f").unwrap().abs() < 1e-12);
        assert!(info_gain(&d, "f").unwrap().abs() < 1e-12);
    }

    #[test]
    fn single_bin_feature_has_zero_gain() {
        let schema = Schema::new(
            vec![FeatureDef {
                name: "f".into(),
                kind: FeatureKind::Nominal(vec!["only".into()]),
                group: Group::Form,
            }],
            "status",
            "good",
            "bad",
        )
        .unwrap();
        let d = Dataset::new(
            schema,
            vec![
                Instance { values: vec![Value::Cat(0)], label: Label::Good },
                Instance { values: vec![Value::Cat(0)], label: Label::Bad },
            ],
        )
        .unwrap();
        assert_eq!(info_gain(&d, "f").unwrap(), 0.0);
    }

    #[test]
    fn unknown_feature_is_reported() {
        let d = worked_table();
        assert!(chi_squared(&d, "absent").is_err());
    }

    fn two_feature_dataset() -> Dataset {
        let schema = Schema::new(
            vec![
                FeatureDef {
                    name: "signal".into(),
                    kind: FeatureKind::Nominal(vec!["lo".into(), "hi".into()]),
                    group: Group::Form,
                },
                FeatureDef {
                    name: "noise".into(),
                    kind: FeatureKind::Nominal(vec!["x".into()]),
                    group: Group::Bank,
                },
            ],
            "status",
            "good",
            "bad",
        )
        .unwrap();
        let mut instances = Vec::new();
        for i in 0..12 {
            let good = i < 8;
            instances.push(Instance {
                values: vec![Value::Cat(u32::from(good)), Value::Cat(0)],
                label: if good { Label::Good } else { Label::Bad },
            });
        }
        Dataset::new(schema, instances).unwrap()
    }

    #[test]
    fn correlated_feature_ranks_first() {
        let d = two_feature_dataset();
        for metric in [RankMetric::Chi2, RankMetric::InfoGain] {
            let r = rank_features(&d, metric).unwrap();
            assert_eq!(r.entries.len(), 2);
            assert_eq!(r.entries[0].feature, "signal");
            assert!(r.entries[0].statistic > r.entries[1].statistic);
        }
    }

    #[test]
    fn ties_keep_schema_order() {
        // two identical constant features: both statistics zero
        let schema = Schema::new(
            vec![
                FeatureDef {
                    name: "a".into(),
                    kind: FeatureKind::Nominal(vec!["x".into()]),
                    group: Group::Form,
                },
                FeatureDef {
                    name: "b".into(),
                    kind: FeatureKind::Nominal(vec!["x".into()]),
                    group: Group::Form,
                },
            ],
            "status",
            "good",
            "bad",
        )
        .unwrap();
        let d = Dataset::new(
            schema,
            vec![
                Instance { values: vec![Value::Cat(0), Value::Cat(0)], label: Label::Good },
                Instance { values: vec![Value::Cat(0), Value::Cat(0)], label: Label::Bad },
            ],
        )
        .unwrap();
        let r = rank_features(&d, RankMetric::Chi2).unwrap();
        assert_eq!(r.entries[0].feature, "a");
        assert_eq!(r.entries[1].feature, "b");
    }

    #[test]
    fn ranking_csv_shape() {
        let d = two_feature_dataset();
        let r = rank_features(&d, RankMetric::Chi2).unwrap();
        let mut buf = Vec::new();
        write_ranking_csv(&mut buf, &r, d.schema()).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "rank,feature,group,statistic");
        assert!(lines[1].starts_with("1,signal,form,"));
        assert!(lines[2].starts_with("2,noise,bank,"));
    }

    fn mixed_train(n_good: usize, n_bad: usize, seed: u64) -> Dataset {
        use rand::Rng;
        let mut rng = crate::seed::component_rng(seed, "rank-test-data", 0);
        let schema = Schema::new(
            vec![
                FeatureDef { name: "num".into(), kind: FeatureKind::Numeric, group: Group::Form },
                FeatureDef {
                    name: "cat".into(),
                    kind: FeatureKind::Nominal(vec!["p".into(), "q".into()]),
                    group: Group::Bank,
                },
            ],
            "status",
            "good",
            "bad",
        )
        .unwrap();
        let mut instances = Vec::new();
        for i in 0..(n_good + n_bad) {
            let good = i < n_good;
            let shift = if good { 1.0 } else { -1.0 };
            instances.push(Instance {
                values: vec![
                    Value::Num(shift + rng.gen_range(-1.0..1.0)),
                    Value::Cat(u32::from(rng.gen_bool(if good { 0.8 } else { 0.3 }))),
                ],
                label: if good { Label::Good } else { Label::Bad },
            });
        }
        Dataset::new(schema, instances).unwrap()
    }

    fn nb_spec(n_features: usize) -> PipelineSpec {
        PipelineSpec {
            metric: RankMetric::Chi2,
            n_features,
            classifier: ClassifierSpec::default_for(ClassifierKind::NaiveBayes),
            threshold_mode: ThresholdMode::DefaultHalf,
        }
    }

    #[test]
    fn full_selection_is_a_no_op() {
        let train = mixed_train(30, 30, 1);
        let p = fit_pipeline(&train, &nb_spec(2), 7).unwrap();
        let mut selected = p.selected.clone();
        selected.sort_unstable();
        assert_eq!(selected, vec![0, 1]);
    }

    #[test]
    fn pipeline_is_pure_in_its_inputs() {
        let train = mixed_train(25, 25, 2);
        let a = fit_pipeline(&train, &nb_spec(1), 3).unwrap();
        let b = fit_pipeline(&train, &nb_spec(1), 3).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn selection_is_a_prefix_of_the_ranking() {
        let train = mixed_train(40, 20, 3);
        let cuts = CutPointModel::fit(&train);
        let binned = apply_discretization(&train, &cuts).unwrap();
        let ranking = rank_features(&binned, RankMetric::Chi2).unwrap();
        for k in 1..=2 {
            let p = fit_pipeline(&train, &nb_spec(k), 5).unwrap();
            let prefix: Vec<usize> = ranking.entries[..k].iter().map(|e| e.index).collect();
            assert_eq!(p.selected, prefix);
        }
    }

    #[test]
    fn n_features_bounds_are_enforced() {
        let train = mixed_train(10, 10, 4);
        assert!(matches!(
            fit_pipeline(&train, &nb_spec(0), 0),
            Err(ModelError::BadFeatureCount { .. })
        ));
        assert!(matches!(
            fit_pipeline(&train, &nb_spec(3), 0),
            Err(ModelError::BadFeatureCount { .. })
        ));
    }

    #[test]
    fn single_class_train_is_rejected() {
        let train = mixed_train(10, 0, 5);
        assert!(matches!(fit_pipeline(&train, &nb_spec(1), 0), Err(ModelError::SingleClass)));
    }

    #[test]
    fn nn1_pipeline_scores_its_own_training_good_as_one() {
        let train = mixed_train(15, 15, 6);
        let spec = PipelineSpec {
            metric: RankMetric::Chi2,
            n_features: 2,
            classifier: ClassifierSpec::Nn1 { normalize: true },
            threshold_mode: ThresholdMode::DefaultHalf,
        };
        let p = fit_pipeline(&train, &spec, 9).unwrap();
        let good = train.instances().iter().find(|i| i.label == Label::Good).unwrap();
        assert_eq!(p.score(&good.values).unwrap(), 1.0);
    }

    #[test]
    fn f1_threshold_mode_sets_provenance() {
        let train = mixed_train(40, 12, 7);
        let spec = PipelineSpec {
            threshold_mode: ThresholdMode::F1Optimized,
            ..nb_spec(2)
        };
        let p = fit_pipeline(&train, &spec, 11).unwrap();
        assert_eq!(p.threshold.provenance, crate::imbalance::ThresholdProvenance::F1Optimized);
        assert!((0.0..=1.0).contains(&p.threshold.t));
    }

    #[test]
    fn cost_ratio_mode_shifts_threshold() {
        let train = mixed_train(20, 20, 8);
        let spec = PipelineSpec { threshold_mode: ThresholdMode::CostRatio(5.0), ..nb_spec(2) };
        let p = fit_pipeline(&train, &spec, 2).unwrap();
        assert!((p.threshold.t - 5.0 / 6.0).abs() < 1e-12);
    }

    proptest! {
        // Shuffling instance order never changes the ranking.
        #[test]
        fn ranking_is_permutation_invariant(perm_seed in 0u64..1000) {
            use rand::seq::SliceRandom;
            let d = mixed_train(20, 12, 9);
            let cuts = CutPointModel::fit(&d);
            let binned = apply_discretization(&d, &cuts).unwrap();
            let base = rank_features(&binned, RankMetric::InfoGain).unwrap();

            let mut order: Vec<usize> = (0..d.len()).collect();
            let mut rng = crate::seed::component_rng(perm_seed, "perm", 0);
            order.shuffle(&mut rng);
            let shuffled = binned.subset(&order);
            let shuffled_rank = rank_features(&shuffled, RankMetric::InfoGain).unwrap();
            prop_assert_eq!(base, shuffled_rank);
        }

        // A factorizing bin x class table scores zero on both statistics.
        #[test]
        fn independence_gives_zero_statistics(
            row_weights in proptest::collection::vec(1usize..5, 2..5),
            good_share in 1usize..5,
        ) {
            let bins = row_weights.len();
            let schema = Schema::new(
                vec![FeatureDef {
                    name: "f".into(),
                    kind: FeatureKind::Nominal((0..bins).map(|b| format!("b{b}")).collect()),
                    group: Group::Form,
                }],
                "status",
                "good",
                "bad",
            )
            .unwrap();
            let mut instances = Vec::new();
            for (bin, &w) in row_weights.iter().enumerate() {
                for _ in 0..(w * good_share) {
                    instances.push(Instance { values: vec![Value::Cat(bin as u32)], label: Label::Good });
                }
                for _ in 0..w {
                    instances.push(Instance { values: vec![Value::Cat(bin as u32)], label: Label::Bad });
                }
            }
            let d = Dataset::new(schema, instances).unwrap();
            prop_assert!(chi_squared(&d, "f").unwrap().abs() < 1e-12);
            prop_assert!(info_gain(&d, "f").unwrap().abs() < 1e-12);
        }
    }
}
