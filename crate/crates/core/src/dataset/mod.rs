//! Dataset representation and bookkeeping.
//!
//! A [`Dataset`] is an immutable list of [`Instance`]s conforming to a
//! [`Schema`]. Class labels are strictly binary good/bad; nominal values are
//! stored as indices into the schema's category domain.

mod csv_io;
mod folds;
mod sidecar;

pub use csv_io::{parse_csv, parse_csv_lenient, write_csv, RowError};
pub use folds::{stratified_folds, FoldAssignment};
pub use sidecar::{parse_schema_sidecar, write_schema_sidecar};

use crate::error::DataError;

/// Binary class label. `Good` is the positive class throughout the crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Label {
    Good,
    Bad,
}

impl Label {
    pub fn flip(self) -> Label {
        match self {
            Label::Good => Label::Bad,
            Label::Bad => Label::Good,
        }
    }
}

/// Feature-set membership: declared on the application form or derived from
/// bank statements.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Group {
    Form,
    Bank,
}

impl Group {
    pub fn as_str(self) -> &'static str {
        match self {
            Group::Form => "form",
            Group::Bank => "bank",
        }
    }

    pub fn parse(s: &str) -> Option<Group> {
        match s {
            "form" => Some(Group::Form),
            "bank" => Some(Group::Bank),
            _ => None,
        }
    }
}

/// Feature type: numeric, or nominal with a fixed category domain.
#[derive(Debug, Clone, PartialEq)]
pub enum FeatureKind {
    Numeric,
    Nominal(Vec<String>),
}

impl FeatureKind {
    pub fn is_numeric(&self) -> bool {
        matches!(self, FeatureKind::Numeric)
    }

    pub fn domain(&self) -> Option<&[String]> {
        match self {
            FeatureKind::Numeric => None,
            FeatureKind::Nominal(d) => Some(d),
        }
    }
}

/// One feature declaration.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureDef {
    pub name: String,
    pub kind: FeatureKind,
    pub group: Group,
}

/// Dataset schema: ordered features plus the binary class declaration.
#[derive(Debug, Clone, PartialEq)]
pub struct Schema {
    pub features: Vec<FeatureDef>,
    pub class_name: String,
    /// The "good" label.
    pub positive_label: String,
    /// The "bad" label.
    pub negative_label: String,
}

/// A single cell: a number, a category (index into the feature's domain), or
/// missing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Value {
    Num(f64),
    Cat(u32),
    Missing,
}

impl Value {
    pub fn is_missing(&self) -> bool {
        matches!(self, Value::Missing)
    }
}

/// One labelled applicant record.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub values: Vec<Value>,
    pub label: Label,
}

/// An immutable, schema-conforming sample set.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    schema: Schema,
    instances: Vec<Instance>,
}

// Characters that would collide with the sidecar and persisted-model formats.
const FORBIDDEN_NAME_CHARS: [char; 4] = [',', '|', '\t', '\n'];

impl Schema {
    pub fn new(
        features: Vec<FeatureDef>,
        class_name: impl Into<String>,
        positive_label: impl Into<String>,
        negative_label: impl Into<String>,
    ) -> Result<Schema, DataError> {
        let schema = Schema {
            features,
            class_name: class_name.into(),
            positive_label: positive_label.into(),
            negative_label: negative_label.into(),
        };
        schema.validate()?;
        Ok(schema)
    }

    fn validate(&self) -> Result<(), DataError> {
        if self.positive_label == self.negative_label {
            return Err(DataError::InvalidSchema(
                "positive and negative class labels must differ".into(),
            ));
        }
        let mut seen = std::collections::BTreeSet::new();
        for f in &self.features {
            if f.name.is_empty() {
                return Err(DataError::InvalidSchema("empty feature name".into()));
            }
            if f.name == "class" {
                return Err(DataError::InvalidSchema(
                    "feature name 'class' is reserved".into(),
                ));
            }
            if f.name.contains(FORBIDDEN_NAME_CHARS) {
                return Err(DataError::InvalidSchema(format!(
                    "feature name '{}' contains a reserved character (comma, pipe, tab, newline)",
                    f.name
                )));
            }
            if !seen.insert(f.name.as_str()) {
                return Err(DataError::InvalidSchema(format!(
                    "duplicate feature name '{}'",
                    f.name
                )));
            }
            if let FeatureKind::Nominal(domain) = &f.kind {
                if domain.is_empty() {
                    return Err(DataError::InvalidSchema(format!(
                        "nominal feature '{}' has an empty domain",
                        f.name
                    )));
                }
                let mut cats = std::collections::BTreeSet::new();
                for c in domain {
                    if c.is_empty() || c.contains(FORBIDDEN_NAME_CHARS) {
                        return Err(DataError::InvalidSchema(format!(
                            "feature '{}': invalid category '{}'",
                            f.name, c
                        )));
                    }
                    if !cats.insert(c.as_str()) {
                        return Err(DataError::InvalidSchema(format!(
                            "feature '{}': duplicate category '{}'",
                            f.name, c
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn feature_index(&self, name: &str) -> Option<usize> {
        self.features.iter().position(|f| f.name == name)
    }

    pub fn label_of(&self, text: &str) -> Option<Label> {
        if text == self.positive_label {
            Some(Label::Good)
        } else if text == self.negative_label {
            Some(Label::Bad)
        } else {
            None
        }
    }

    pub fn label_text(&self, label: Label) -> &str {
        match label {
            Label::Good => &self.positive_label,
            Label::Bad => &self.negative_label,
        }
    }
}

impl Dataset {
    /// Build a dataset, checking every instance against the schema.
    pub fn new(schema: Schema, instances: Vec<Instance>) -> Result<Dataset, DataError> {
        schema.validate()?;
        for (i, inst) in instances.iter().enumerate() {
            conformance(&schema, inst).map_err(|reason| DataError::NonConforming { index: i, reason })?;
        }
        Ok(Dataset { schema, instances })
    }

    pub fn schema(&self) -> &Schema {
        &self.schema
    }

    pub fn instances(&self) -> &[Instance] {
        &self.instances
    }

    pub fn len(&self) -> usize {
        self.instances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instances.is_empty()
    }

    /// `(n_good, n_bad)`.
    pub fn class_counts(&self) -> (usize, usize) {
        let good = self
            .instances
            .iter()
            .filter(|i| i.label == Label::Good)
            .count();
        (good, self.instances.len() - good)
    }

    /// Non-missing `(value, label)` pairs of a numeric feature.
    pub fn numeric_column(&self, feature: usize) -> (Vec<f64>, Vec<Label>) {
        let mut values = Vec::new();
        let mut labels = Vec::new();
        for inst in &self.instances {
            if let Value::Num(v) = inst.values[feature] {
                values.push(v);
                labels.push(inst.label);
            }
        }
        (values, labels)
    }

    /// The subset of instances with the given indices (order preserved).
    pub fn subset(&self, indices: &[usize]) -> Dataset {
        Dataset {
            schema: self.schema.clone(),
            instances: indices.iter().map(|&i| self.instances[i].clone()).collect(),
        }
    }

    /// Projection onto the features with the given schema indices.
    pub fn project(&self, feature_indices: &[usize]) -> Dataset {
        let features = feature_indices
            .iter()
            .map(|&i| self.schema.features[i].clone())
            .collect();
        let schema = Schema {
            features,
            class_name: self.schema.class_name.clone(),
            positive_label: self.schema.positive_label.clone(),
            negative_label: self.schema.negative_label.clone(),
        };
        let instances = self
            .instances
            .iter()
            .map(|inst| Instance {
                values: feature_indices.iter().map(|&i| inst.values[i]).collect(),
                label: inst.label,
            })
            .collect();
        Dataset { schema, instances }
    }

    /// Restrict to one feature group; `None` keeps the combined set.
    pub fn select_group(&self, group: Option<Group>) -> Dataset {
        match group {
            None => self.clone(),
            Some(g) => {
                let indices: Vec<usize> = self
                    .schema
                    .features
                    .iter()
                    .enumerate()
                    .filter(|(_, f)| f.group == g)
                    .map(|(i, _)| i)
                    .collect();
                self.project(&indices)
            }
        }
    }

    /// Splits into (train, test) where `test` is fold `fold` of `assignment`.
    pub fn split_fold(&self, assignment: &FoldAssignment, fold: usize) -> (Dataset, Dataset) {
        let mut train = Vec::new();
        let mut test = Vec::new();
        for (i, &f) in assignment.assignment.iter().enumerate() {
            if f == fold {
                test.push(i);
            } else {
                train.push(i);
            }
        }
        (self.subset(&train), self.subset(&test))
    }

    /// Appends instances, re-checking conformance.
    pub fn with_instances(&self, extra: Vec<Instance>) -> Result<Dataset, DataError> {
        let mut instances = self.instances.clone();
        instances.extend(extra);
        Dataset::new(self.schema.clone(), instances)
    }
}

fn conformance(schema: &Schema, inst: &Instance) -> Result<(), String> {
    if inst.values.len() != schema.features.len() {
        return Err(format!(
            "expected {} values, found {}",
            schema.features.len(),
            inst.values.len()
        ));
    }
    for (f, v) in schema.features.iter().zip(&inst.values) {
        match (&f.kind, v) {
            (_, Value::Missing) => {}
            (FeatureKind::Numeric, Value::Num(x)) => {
                if !x.is_finite() {
                    return Err(format!("feature '{}': non-finite numeric value", f.name));
                }
            }
            (FeatureKind::Nominal(domain), Value::Cat(c)) => {
                if *c as usize >= domain.len() {
                    return Err(format!(
                        "feature '{}': category index {} out of domain (size {})",
                        f.name,
                        c,
                        domain.len()
                    ));
                }
            }
            (FeatureKind::Numeric, Value::Cat(_)) => {
                return Err(format!("feature '{}': categorical value in numeric feature", f.name));
            }
            (FeatureKind::Nominal(_), Value::Num(_)) => {
                return Err(format!("feature '{}': numeric value in nominal feature", f.name));
            }
        }
    }
    Ok(())
}
