//! Export of preprocessed designs: a CSV of the normalized columns plus
//! `y`, and a `<stem>.provenance.json` sidecar.

use std::path::Path;

use landscape_core::preprocess::{Column, ProcessedDesign, Provenance};
use serde::Serialize;

use crate::design_csv::{header_field, sidecar_path};
use crate::error::Result;
use crate::fmt_f64;

#[derive(Serialize)]
struct ProvenanceDoc<'a> {
    provenance: &'a Provenance,
    normalized: bool,
    columns: &'a [Column],
    column_map: &'a [Vec<usize>],
}

pub fn to_csv(pd: &ProcessedDesign) -> String {
    let mut out: String = pd
        .columns()
        .iter()
        .map(|c| header_field(&c.name))
        .chain(std::iter::once("y".to_string()))
        .collect::<Vec<_>>()
        .join(",");
    out.push('\n');
    for (row, y) in pd.xn().iter().zip(pd.yn()) {
        let fields: Vec<String> = row.iter().chain(std::iter::once(y)).map(|v| fmt_f64(*v)).collect();
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

pub fn write(path: &Path, pd: &ProcessedDesign) -> Result<()> {
    crate::write_file(path, to_csv(pd).as_bytes())?;
    let doc = ProvenanceDoc {
        provenance: pd.provenance(),
        normalized: pd.is_normalized(),
        columns: pd.columns(),
        column_map: pd.column_map(),
    };
    let text = serde_json::to_string_pretty(&doc).expect("provenance serializes");
    crate::write_file(&sidecar_path(path, ".provenance.json"), format!("{text}\n").as_bytes())
}
