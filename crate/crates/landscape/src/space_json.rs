//! Search spaces as JSON: an array of variable objects.
//!
//! ```json
//! [
//!   {"name": "kernel", "kind": "categorical", "categories": ["rbf", "linear"]},
//!   {"name": "gamma", "kind": "continuous", "lower": 1e-4, "upper": 1.0,
//!    "condition": {"parent": "kernel", "values": ["rbf"]}}
//! ]
//! ```

use std::path::Path;

use landscape_core::space::{Condition, ConditionValue, Domain, SearchSpace, VariableSpec};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct VariableDoc {
    name: String,
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    lower: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    upper: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    categories: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    condition: Option<ConditionDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConditionDoc {
    parent: String,
    values: Vec<Value>,
}

pub fn to_value(space: &SearchSpace) -> Value {
    let docs: Vec<VariableDoc> = space.variables().iter().map(to_doc).collect();
    serde_json::to_value(docs).expect("space documents serialize")
}

fn to_doc(v: &VariableSpec) -> VariableDoc {
    let (lower, upper, categories) = match &v.domain {
        Domain::Continuous { lower, upper } => (Some(Value::from(*lower)), Some(Value::from(*upper)), None),
        Domain::Integer { lower, upper } => (Some(Value::from(*lower)), Some(Value::from(*upper)), None),
        Domain::Categorical { categories } => (None, None, Some(categories.clone())),
    };
    VariableDoc {
        name: v.name.clone(),
        kind: v.domain.kind_name().to_string(),
        lower,
        upper,
        categories,
        condition: v.condition.as_ref().map(|c| ConditionDoc {
            parent: c.parent.clone(),
            values: c
                .values
                .iter()
                .map(|cv| match cv {
                    ConditionValue::Integer(i) => Value::from(*i),
                    ConditionValue::Label(s) => Value::from(s.clone()),
                })
                .collect(),
        }),
    }
}

pub fn from_value(value: Value) -> std::result::Result<SearchSpace, String> {
    let docs: Vec<VariableDoc> = serde_json::from_value(value).map_err(|e| e.to_string())?;
    let vars = docs.into_iter().map(from_doc).collect::<std::result::Result<Vec<_>, _>>()?;
    SearchSpace::new(vars).map_err(|e| e.to_string())
}

fn bound<T>(doc: &VariableDoc, which: &str, v: &Option<Value>, get: impl Fn(&Value) -> Option<T>) -> std::result::Result<T, String> {
    let v = v.as_ref().ok_or_else(|| format!("variable {}: missing `{which}`", doc.name))?;
    get(v).ok_or_else(|| format!("variable {}: `{which}` has the wrong type ({v})", doc.name))
}

fn from_doc(doc: VariableDoc) -> std::result::Result<VariableSpec, String> {
    let spec = match doc.kind.as_str() {
        "continuous" => {
            if doc.categories.is_some() {
                return Err(format!("variable {}: continuous variables take no categories", doc.name));
            }
            VariableSpec::continuous(
                doc.name.clone(),
                bound(&doc, "lower", &doc.lower, Value::as_f64)?,
                bound(&doc, "upper", &doc.upper, Value::as_f64)?,
            )
        }
        "integer" => {
            if doc.categories.is_some() {
                return Err(format!("variable {}: integer variables take no categories", doc.name));
            }
            VariableSpec::integer(
                doc.name.clone(),
                bound(&doc, "lower", &doc.lower, Value::as_i64)?,
                bound(&doc, "upper", &doc.upper, Value::as_i64)?,
            )
        }
        "categorical" => {
            if doc.lower.is_some() || doc.upper.is_some() {
                return Err(format!("variable {}: categorical variables take no bounds", doc.name));
            }
            let cats = doc
                .categories
                .clone()
                .ok_or_else(|| format!("variable {}: missing `categories`", doc.name))?;
            VariableSpec::categorical(doc.name.clone(), cats)
        }
        other => return Err(format!("variable {}: unknown kind `{other}`", doc.name)),
    };
    Ok(match doc.condition {
        None => spec,
        Some(c) => {
            let values = c
                .values
                .iter()
                .map(|v| match v {
                    Value::String(s) => Ok(ConditionValue::Label(s.clone())),
                    v => v
                        .as_i64()
                        .map(ConditionValue::Integer)
                        .ok_or_else(|| format!("variable {}: condition value {v} is neither a label nor an integer", doc.name)),
                })
                .collect::<std::result::Result<Vec<_>, _>>()?;
            VariableSpec {
                condition: Some(Condition { parent: c.parent, values }),
                ..spec
            }
        }
    })
}

pub fn read(path: &Path) -> Result<SearchSpace> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Read { path: path.into(), source })?;
    let value: Value = serde_json::from_str(&text).map_err(|e| Error::format(path, e))?;
    from_value(value).map_err(|e| Error::format(path, e))
}

pub fn write(path: &Path, space: &SearchSpace) -> Result<()> {
    let text = serde_json::to_string_pretty(&to_value(space)).expect("space serializes");
    crate::write_file(path, format!("{text}\n").as_bytes())
}
