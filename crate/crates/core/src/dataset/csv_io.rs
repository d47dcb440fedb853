//! CSV ingestion and serialization.
//!
//! Input is header-rowed RFC-4180 CSV. Header names must match the schema's
//! feature names plus the class column, in any order. Empty cells and the
//! missing token (default `?`) parse as missing.

use std::io::{Read, Write};

use crate::dataset::{Dataset, FeatureKind, Instance, Schema, Value};
use crate::error::DataError;

pub const DEFAULT_MISSING_TOKEN: &str = "?";

/// A rejected row: 1-based data row number plus the reason.
#[derive(Debug)]
pub struct RowError {
    pub row: usize,
    pub error: DataError,
}

/// Strict parse: any row error fails the whole read.
pub fn parse_csv<R: Read>(reader: R, schema: &Schema) -> Result<Dataset, DataError> {
    parse_csv_with_token(reader, schema, DEFAULT_MISSING_TOKEN)
}

pub fn parse_csv_with_token<R: Read>(
    reader: R,
    schema: &Schema,
    missing_token: &str,
) -> Result<Dataset, DataError> {
    let (dataset, errors) = parse_csv_lenient_with_token(reader, schema, missing_token)?;
    if let Some(first) = errors.first() {
        return Err(DataError::RowErrors(errors.len(), first.error.to_string()));
    }
    Ok(dataset)
}

/// Lenient parse: bad rows are skipped and reported, so
/// `input rows == dataset.len() + errors.len()`.
pub fn parse_csv_lenient<R: Read>(
    reader: R,
    schema: &Schema,
) -> Result<(Dataset, Vec<RowError>), DataError> {
    parse_csv_lenient_with_token(reader, schema, DEFAULT_MISSING_TOKEN)
}

pub fn parse_csv_lenient_with_token<R: Read>(
    reader: R,
    schema: &Schema,
    missing_token: &str,
) -> Result<(Dataset, Vec<RowError>), DataError> {
    let mut rdr = csv::ReaderBuilder::new().flexible(true).from_reader(reader);

    let headers = rdr
        .headers()
        .map_err(|e| DataError::Csv(e.to_string()))?
        .clone();
    // Map each schema feature (and the class column) to its header position.
    let column_of = |name: &str| -> Result<usize, DataError> {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| DataError::MissingColumn(name.to_string()))
    };
    let feature_cols: Vec<usize> = schema
        .features
        .iter()
        .map(|f| column_of(&f.name))
        .collect::<Result<_, _>>()?;
    let class_col = column_of(&schema.class_name)?;

    let mut instances = Vec::new();
    let mut errors = Vec::new();
    for (idx, record) in rdr.records().enumerate() {
        let row = idx + 1;
        let record = match record {
            Ok(r) => r,
            Err(e) => {
                errors.push(RowError { row, error: DataError::Csv(e.to_string()) });
                continue;
            }
        };
        match parse_record(&record, schema, &feature_cols, class_col, missing_token, row) {
            Ok(inst) => instances.push(inst),
            Err(error) => errors.push(RowError { row, error }),
        }
    }
    let dataset = Dataset::new(schema.clone(), instances)?;
    Ok((dataset, errors))
}

fn parse_record(
    record: &csv::StringRecord,
    schema: &Schema,
    feature_cols: &[usize],
    class_col: usize,
    missing_token: &str,
    row: usize,
) -> Result<Instance, DataError> {
    let expected = schema.features.len() + 1;
    if record.len() < expected {
        return Err(DataError::RowArity { row, expected, found: record.len() });
    }
    let mut values = Vec::with_capacity(schema.features.len());
    for (feature, &col) in schema.features.iter().zip(feature_cols) {
        let cell = record.get(col).unwrap_or("");
        if cell.is_empty() || cell == missing_token {
            values.push(Value::Missing);
            continue;
        }
        match &feature.kind {
            FeatureKind::Numeric => {
                let parsed: f64 = cell.parse().map_err(|_| DataError::BadNumeric {
                    row,
                    feature: feature.name.clone(),
                    value: cell.to_string(),
                })?;
                if !parsed.is_finite() {
                    return Err(DataError::BadNumeric {
                        row,
                        feature: feature.name.clone(),
                        value: cell.to_string(),
                    });
                }
                values.push(Value::Num(parsed));
            }
            FeatureKind::Nominal(domain) => {
                let cat = domain.iter().position(|c| c == cell).ok_or_else(|| {
                    DataError::UnknownCategory {
                        row,
                        feature: feature.name.clone(),
                        value: cell.to_string(),
                    }
                })?;
                values.push(Value::Cat(cat as u32));
            }
        }
    }
    let class_cell = record.get(class_col).unwrap_or("");
    let label = schema
        .label_of(class_cell)
        .ok_or_else(|| DataError::UnknownClassLabel { row, value: class_cell.to_string() })?;
    Ok(Instance { values, label })
}

/// Serialize with features in schema order and the class column last.
/// Numbers use shortest round-trip rendering, so parse(write(d)) == d.
pub fn write_csv<W: Write>(writer: W, dataset: &Dataset) -> Result<(), DataError> {
    write_csv_with_token(writer, dataset, DEFAULT_MISSING_TOKEN)
}

pub fn write_csv_with_token<W: Write>(
    writer: W,
    dataset: &Dataset,
    missing_token: &str,
) -> Result<(), DataError> {
    let schema = dataset.schema();
    let mut wtr = csv::Writer::from_writer(writer);
    let mut header: Vec<&str> = schema.features.iter().map(|f| f.name.as_str()).collect();
    header.push(&schema.class_name);
    wtr.write_record(&header).map_err(|e| DataError::Csv(e.to_string()))?;

    for inst in dataset.instances() {
        let mut record: Vec<String> = Vec::with_capacity(inst.values.len() + 1);
        for (feature, value) in schema.features.iter().zip(&inst.values) {
            record.push(match value {
                Value::Missing => missing_token.to_string(),
                Value::Num(x) => format!("{x}"),
                Value::Cat(c) => match &feature.kind {
                    FeatureKind::Nominal(domain) => domain[*c as usize].clone(),
                    FeatureKind::Numeric => unreachable!("conformance checked at construction"),
                },
            });
        }
        record.push(schema.label_text(inst.label).to_string());
        wtr.write_record(&record).map_err(|e| DataError::Csv(e.to_string()))?;
    }
    wtr.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{FeatureDef, Group, Label};
    use proptest::prelude::*;

    fn schema() -> Schema {
        Schema::new(
            vec![
                FeatureDef {
                    name: "income".into(),
                    kind: FeatureKind::Numeric,
                    group: Group::Form,
                },
                FeatureDef {
                    name: "card".into(),
                    kind: FeatureKind::Nominal(vec!["A".into(), "B".into()]),
                    group: Group::Bank,
                },
            ],
            "status",
            "good",
            "bad",
        )
        .unwrap()
    }

    #[test]
    fn parses_minimal_two_row_csv() {
        let csv = "income,card,status\n10,A,good\n20,B,bad\n";
        let d = parse_csv(csv.as_bytes(), &schema()).unwrap();
        assert_eq!(d.len(), 2);
        assert_eq!(d.instances()[0].values, vec![Value::Num(10.0), Value::Cat(0)]);
        assert_eq!(d.instances()[0].label, Label::Good);
        assert_eq!(d.instances()[1].label, Label::Bad);
    }

    #[test]
    fn missing_token_in_numeric_column_is_missing() {
        let csv = "income,card,status\n?,A,good\n";
        let d = parse_csv(csv.as_bytes(), &schema()).unwrap();
        assert_eq!(d.instances()[0].values[0], Value::Missing);
    }

    #[test]
    fn empty_cell_is_missing() {
        let csv = "income,card,status\n,A,good\n";
        let d = parse_csv(csv.as_bytes(), &schema()).unwrap();
        assert_eq!(d.instances()[0].values[0], Value::Missing);
    }

    #[test]
    fn unknown_category_names_row_and_feature() {
        let csv = "income,card,status\n1,Z,good\n";
        let err = parse_csv(csv.as_bytes(), &schema()).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("row 1"), "{msg}");
        assert!(msg.contains("card"), "{msg}");
        assert!(msg.contains("Z"), "{msg}");
    }

    #[test]
    fn unparseable_numeric_reports_row() {
        let csv = "income,card,status\nabc,A,good\n";
        let err = parse_csv(csv.as_bytes(), &schema()).unwrap_err();
        assert!(err.to_string().contains("row 1"));
    }

    #[test]
    fn unknown_class_label_reports_row() {
        let csv = "income,card,status\n1,A,maybe\n";
        let err = parse_csv(csv.as_bytes(), &schema()).unwrap_err();
        assert!(err.to_string().contains("maybe"));
    }

    #[test]
    fn header_permutation_resolved_by_name() {
        let csv = "status,card,income\ngood,B,7.5\n";
        let d = parse_csv(csv.as_bytes(), &schema()).unwrap();
        assert_eq!(d.instances()[0].values, vec![Value::Num(7.5), Value::Cat(1)]);
    }

    #[test]
    fn lenient_parse_accounts_for_every_row() {
        let csv = "income,card,status\n1,A,good\nbad_number,A,good\n2,Z,bad\n3,B,bad\n";
        let (d, errors) = parse_csv_lenient(csv.as_bytes(), &schema()).unwrap();
        assert_eq!(d.len() + errors.len(), 4);
        assert_eq!(errors.len(), 2);
        assert_eq!(errors[0].row, 2);
        assert_eq!(errors[1].row, 3);
    }

    #[test]
    fn rfc4180_quoting_round_trips() {
        let schema = Schema::new(
            vec![FeatureDef {
                name: "note".into(),
                kind: FeatureKind::Nominal(vec!["has, comma".into(), "plain".into()]),
                group: Group::Form,
            }],
            "status",
            "good",
            "bad",
        )
        .unwrap();
        let d = Dataset::new(
            schema,
            vec![Instance { values: vec![Value::Cat(0)], label: Label::Good }],
        )
        .unwrap();
        let mut buf = Vec::new();
        write_csv(&mut buf, &d).unwrap();
        let again = parse_csv(buf.as_slice(), d.schema()).unwrap();
        assert_eq!(again, d);
    }

    prop_compose! {
        fn arb_instance()(
            num in prop_oneof![
                3 => any::<i32>().prop_map(|v| Value::Num(v as f64 / 16.0)),
                1 => Just(Value::Missing),
            ],
            cat in prop_oneof![
                3 => (0u32..2).prop_map(Value::Cat),
                1 => Just(Value::Missing),
            ],
            good in any::<bool>(),
        ) -> Instance {
            Instance {
                values: vec![num, cat],
                label: if good { Label::Good } else { Label::Bad },
            }
        }
    }

    proptest! {
        // Serializing and re-parsing yields an identical dataset.
        #[test]
        fn csv_round_trip(instances in proptest::collection::vec(arb_instance(), 0..40)) {
            let d = Dataset::new(schema(), instances).unwrap();
            let mut buf = Vec::new();
            write_csv(&mut buf, &d).unwrap();
            let again = parse_csv(buf.as_slice(), d.schema()).unwrap();
            prop_assert_eq!(again, d);
        }
    }
}
