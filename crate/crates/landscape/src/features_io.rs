//! Feature vectors as a flat JSON object with `_meta`, and as CSV rows
//! `fid,iid[,group],<features...>` for batch runs.

use std::path::Path;

use landscape_core::aas::{FeatureMatrix, InstanceKey};
use landscape_core::ela::FeatureVector;
use serde_json::{Map, Value};

use crate::design_csv::header_field;
use crate::error::{Error, Result};
use crate::fmt_f64;

/// Extra identification stored in `_meta`.
#[derive(Debug, Clone, Default)]
pub struct Labels {
    pub fid: String,
    pub iid: String,
    pub encoding: String,
}

pub fn to_json(fv: &FeatureVector, labels: &Labels) -> Value {
    let mut obj = Map::new();
    let mut missing = Map::new();
    for (name, value) in fv.iter() {
        match value.value() {
            Some(v) => obj.insert(name.to_string(), Value::from(v)),
            None => obj.insert(name.to_string(), Value::Null),
        };
        if let landscape_core::ela::FeatureValue::Missing(reason) = value {
            missing.insert(name.to_string(), Value::from(reason.code()));
        }
    }
    let versions: Map<String, Value> = fv
        .meta
        .versions
        .iter()
        .map(|(set, v)| (set.clone(), Value::from(v.clone())))
        .collect();
    let meta = serde_json::json!({
        "fid": labels.fid,
        "iid": labels.iid,
        "n": fv.meta.n,
        "dim": fv.meta.dim,
        "seed": fv.meta.seed,
        "encoding": labels.encoding,
        "moment_estimator": fv.meta.moment_estimator,
        "versions": versions,
        "missing": missing,
    });
    obj.insert("_meta".to_string(), meta);
    Value::Object(obj)
}

pub fn write_json(path: &Path, fv: &FeatureVector, labels: &Labels) -> Result<()> {
    let text = serde_json::to_string_pretty(&to_json(fv, labels)).expect("features serialize");
    crate::write_file(path, format!("{text}\n").as_bytes())
}

/// One header plus one row per vector; all vectors must share names.
pub fn to_csv(rows: &[(Labels, FeatureVector)]) -> Result<String> {
    let names: Vec<&str> = rows.first().map(|r| r.1.names().collect()).unwrap_or_default();
    let mut out = String::from("fid,iid");
    for n in &names {
        out.push(',');
        out.push_str(&header_field(n));
    }
    out.push('\n');
    for (labels, fv) in rows {
        if fv.names().ne(names.iter().copied()) {
            return Err(Error::Usage("feature vectors carry different feature sets".into()));
        }
        out.push_str(&header_field(&labels.fid));
        out.push(',');
        out.push_str(&header_field(&labels.iid));
        for (_, v) in fv.iter() {
            out.push(',');
            if let Some(x) = v.value() {
                out.push_str(&fmt_f64(x));
            }
        }
        out.push('\n');
    }
    Ok(out)
}

/// Reads a feature CSV; a `group` third column is used for
/// leave-group-out folds.
pub fn read_csv(path: &Path) -> Result<FeatureMatrix> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| match e.into_kind() {
        csv::ErrorKind::Io(source) => Error::Read { path: path.into(), source },
        other => Error::format(path, format!("{other:?}")),
    })?;
    let header = reader.headers().map_err(|e| Error::format(path, e))?.clone();
    if header.len() < 2 || &header[0] != "fid" || &header[1] != "iid" {
        return Err(Error::format(path, "header must start with fid,iid"));
    }
    let has_group = header.get(2) == Some("group");
    let first = if has_group { 3 } else { 2 };
    let names: Vec<String> = header.iter().skip(first).map(String::from).collect();
    let mut instances = Vec::new();
    let mut rows = Vec::new();
    let mut groups = Vec::new();
    for (r, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::format(path, e))?;
        instances.push(InstanceKey::new(&record[0], &record[1]));
        if has_group {
            groups.push(record[2].to_string());
        }
        let row = record
            .iter()
            .skip(first)
            .map(|f| {
                if f.is_empty() {
                    Ok(None)
                } else {
                    f.parse::<f64>()
                        .ok()
                        .filter(|v| v.is_finite())
                        .map(Some)
                        .ok_or_else(|| Error::format(path, format!("row {}: bad feature value `{f}`", r + 1)))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        rows.push(row);
    }
    let fm = FeatureMatrix::new(names, instances, rows).map_err(|e| Error::format(path, e))?;
    if has_group {
        Ok(fm.with_groups(groups)?)
    } else {
        Ok(fm)
    }
}
