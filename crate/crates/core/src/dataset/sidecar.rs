//! Plain-text schema sidecar.
//!
//! One line per feature, plus one class line, in any order:
//!
//! ```text
//! # comment lines and blank lines are ignored
//! income,numeric,form
//! card_type,nominal,bank,A|B|C
//! class,status,good,bad
//! ```
//!
//! Field 2 is the kind (`numeric` or `nominal`), field 3 the feature group
//! (`form` or `bank`); nominal features carry their category domain as a
//! fourth `|`-separated field. Feature order in the file is the schema order.

use std::io::{BufRead, BufReader, Read, Write};

use crate::dataset::{FeatureDef, FeatureKind, Group, Schema};
use crate::error::DataError;

pub fn parse_schema_sidecar<R: Read>(reader: R) -> Result<Schema, DataError> {
    let mut features = Vec::new();
    let mut class: Option<(String, String, String)> = None;

    for (idx, line) in BufReader::new(reader).lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        let fail = |reason: &str| DataError::Sidecar { line: line_no, reason: reason.to_string() };

        if fields[0] == "class" {
            if fields.len() != 4 {
                return Err(fail("class line must be `class,<name>,<good_label>,<bad_label>`"));
            }
            if class.is_some() {
                return Err(fail("duplicate class line"));
            }
            class = Some((fields[1].to_string(), fields[2].to_string(), fields[3].to_string()));
            continue;
        }

        if fields.len() < 3 {
            return Err(fail("feature line must be `name,kind,group[,cat1|cat2|...]`"));
        }
        let name = fields[0].to_string();
        let group = Group::parse(fields[2])
            .ok_or_else(|| fail("group must be `form` or `bank`"))?;
        let kind = match fields[1] {
            "numeric" => {
                if fields.len() != 3 {
                    return Err(fail("numeric features take no category list"));
                }
                FeatureKind::Numeric
            }
            "nominal" => {
                if fields.len() != 4 {
                    return Err(fail("nominal features need a `|`-separated category list"));
                }
                let domain: Vec<String> = fields[3].split('|').map(str::to_string).collect();
                FeatureKind::Nominal(domain)
            }
            other => return Err(fail(&format!("unknown kind '{other}'"))),
        };
        features.push(FeatureDef { name, kind, group });
    }

    let (class_name, positive, negative) = class.ok_or(DataError::Sidecar {
        line: 0,
        reason: "missing `class,<name>,<good_label>,<bad_label>` line".to_string(),
    })?;
    Schema::new(features, class_name, positive, negative)
}

pub fn write_schema_sidecar<W: Write>(mut writer: W, schema: &Schema) -> Result<(), DataError> {
    for f in &schema.features {
        match &f.kind {
            FeatureKind::Numeric => {
                writeln!(writer, "{},numeric,{}", f.name, f.group.as_str())?;
            }
            FeatureKind::Nominal(domain) => {
                writeln!(writer, "{},nominal,{},{}", f.name, f.group.as_str(), domain.join("|"))?;
            }
        }
    }
    writeln!(
        writer,
        "class,{},{},{}",
        schema.class_name, schema.positive_label, schema.negative_label
    )?;
    Ok(())
}
