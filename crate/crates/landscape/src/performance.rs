//! Performance CSV: `fid,iid,algorithm,run,evaluations,success,budget`.

use std::path::Path;

use landscape_core::aas::PerformanceRecord;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Serialize, Deserialize)]
struct Row {
    fid: String,
    iid: String,
    algorithm: String,
    run: u64,
    evaluations: u64,
    success: u8,
    budget: u64,
}

pub fn read(path: &Path) -> Result<Vec<PerformanceRecord>> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| match e.into_kind() {
        csv::ErrorKind::Io(source) => Error::Read { path: path.into(), source },
        other => Error::format(path, format!("{other:?}")),
    })?;
    let header = reader.headers().map_err(|e| Error::format(path, e))?;
    let expected = ["fid", "iid", "algorithm", "run", "evaluations", "success", "budget"];
    if header.iter().ne(expected) {
        return Err(Error::format(path, format!("header must be {}", expected.join(","))));
    }
    let mut out = Vec::new();
    for (i, row) in reader.deserialize::<Row>().enumerate() {
        let row = row.map_err(|e| Error::format(path, e))?;
        if row.success > 1 {
            return Err(Error::format(path, format!("record {}: success must be 0 or 1", i + 1)));
        }
        out.push(PerformanceRecord {
            fid: row.fid,
            iid: row.iid,
            algorithm: row.algorithm,
            run: row.run,
            evaluations: row.evaluations,
            success: row.success == 1,
            budget: row.budget,
        });
    }
    Ok(out)
}

pub fn to_csv(records: &[PerformanceRecord]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in records {
        w.serialize(Row {
            fid: r.fid.clone(),
            iid: r.iid.clone(),
            algorithm: r.algorithm.clone(),
            run: r.run,
            evaluations: r.evaluations,
            success: u8::from(r.success),
            budget: r.budget,
        })
        .expect("in-memory csv write");
    }
    String::from_utf8(w.into_inner().expect("in-memory csv flush")).expect("csv is utf-8")
}

pub fn write(path: &Path, records: &[PerformanceRecord]) -> Result<()> {
    crate::write_file(path, to_csv(records).as_bytes())
}
