//! Designs as CSV (`x.<name>` columns plus `y`) with a `<stem>.meta.json`
//! sidecar carrying the search space, the sampling metadata and, for
//! built-in problems, the problem identity.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use landscape_core::sampling::{Design, DesignMeta};
use landscape_core::space::{builtin_problem, BuiltinFunction, Cell, Domain, Problem, SearchSpace};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::{fmt_f64, space_json};

/// Reproducible reference to a built-in problem instance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemRef {
    pub function: String,
    pub iid: u64,
    pub dim: usize,
}

impl ProblemRef {
    pub fn of(problem: &Problem) -> Option<Self> {
        problem.instance().map(|inst| ProblemRef {
            function: inst.function.name().to_string(),
            iid: problem.iid,
            dim: problem.space.dim(),
        })
    }

    pub fn build(&self) -> landscape_core::Result<Problem> {
        builtin_problem(BuiltinFunction::from_name(&self.function)?, self.iid, self.dim)
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Sidecar {
    space: Value,
    meta: DesignMeta,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    problem: Option<ProblemRef>,
}

/// `dir/name.csv` -> `dir/name<suffix>`.
pub fn sidecar_path(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}{suffix}"))
}

pub fn meta_path(path: &Path) -> PathBuf {
    sidecar_path(path, ".meta.json")
}

pub(crate) fn quote(field: &str) -> String {
    format!("\"{}\"", field.replace('"', "\"\""))
}

pub(crate) fn header_field(field: &str) -> String {
    if field.contains([',', '"', '\n', '\r']) {
        quote(field)
    } else {
        field.to_string()
    }
}

pub fn to_csv(design: &Design) -> String {
    let space = design.space();
    let mut out = String::new();
    let header: Vec<String> = space
        .variables()
        .iter()
        .map(|v| header_field(&format!("x.{}", v.name)))
        .chain(std::iter::once("y".to_string()))
        .collect();
    out.push_str(&header.join(","));
    out.push('\n');
    for (r, row) in design.rows().iter().enumerate() {
        for (j, cell) in row.iter().enumerate() {
            match (cell, &space.variable(j).domain) {
                (Cell::Real(v), _) => out.push_str(&fmt_f64(*v)),
                (Cell::Int(v), _) => write!(out, "{v}").unwrap(),
                (Cell::Cat(c), Domain::Categorical { categories }) => out.push_str(&quote(&categories[*c])),
                (Cell::Cat(c), _) => write!(out, "{c}").unwrap(),
                (Cell::Missing, _) => {}
            }
            out.push(',');
        }
        if let Some(y) = design.y() {
            out.push_str(&fmt_f64(y[r]));
        }
        out.push('\n');
    }
    out
}

pub fn write(path: &Path, design: &Design, problem: Option<&ProblemRef>) -> Result<()> {
    crate::write_file(path, to_csv(design).as_bytes())?;
    let sidecar = Sidecar {
        space: space_json::to_value(design.space()),
        meta: design.meta.clone(),
        problem: problem.cloned(),
    };
    let text = serde_json::to_string_pretty(&sidecar).expect("sidecar serializes");
    crate::write_file(&meta_path(path), format!("{text}\n").as_bytes())
}

fn parse_cell(space: &SearchSpace, j: usize, field: &str) -> std::result::Result<Cell, String> {
    if field.is_empty() {
        return Ok(Cell::Missing);
    }
    let var = space.variable(j);
    match &var.domain {
        Domain::Continuous { .. } => field
            .parse::<f64>()
            .map(Cell::Real)
            .map_err(|_| format!("`{field}` is not a real number for {}", var.name)),
        Domain::Integer { .. } => field
            .parse::<i64>()
            .map(Cell::Int)
            .map_err(|_| format!("`{field}` is not an integer for {}", var.name)),
        Domain::Categorical { categories } => categories
            .iter()
            .position(|c| c == field)
            .map(Cell::Cat)
            .ok_or_else(|| format!("unknown label `{field}` for {}", var.name)),
    }
}

/// Parses CSV text against `space`.
pub fn from_csv(path: &Path, text: &str, space: Arc<SearchSpace>, meta: Option<DesignMeta>) -> Result<Design> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
    let header = reader.headers().map_err(|e| Error::format(path, e))?.clone();
    let expected: Vec<String> = space
        .variables()
        .iter()
        .map(|v| format!("x.{}", v.name))
        .chain(std::iter::once("y".to_string()))
        .collect();
    if header.iter().ne(expected.iter().map(String::as_str)) {
        return Err(Error::format(
            path,
            format!("header {:?} does not match the space, expected {:?}", header.iter().collect::<Vec<_>>(), expected),
        ));
    }
    let dim = space.dim();
    let mut rows = Vec::new();
    let mut ys = Vec::new();
    for (r, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::format(path, e))?;
        let row = (0..dim)
            .map(|j| parse_cell(&space, j, &record[j]))
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|m| Error::format(path, format!("row {}: {m}", r + 1)))?;
        rows.push(row);
        let y = &record[dim];
        ys.push(if y.is_empty() {
            None
        } else {
            Some(y.parse::<f64>().map_err(|_| Error::format(path, format!("row {}: bad y `{y}`", r + 1)))?)
        });
    }
    let y = if ys.iter().all(Option::is_none) {
        None
    } else if ys.iter().all(Option::is_some) {
        Some(ys.into_iter().flatten().collect())
    } else {
        return Err(Error::format(path, "objective column is partially filled"));
    };
    let n = rows.len();
    let meta = meta.unwrap_or(DesignMeta {
        seed: 0,
        strategy: Default::default(),
        n,
        evaluations_spent: if y.is_some() { n } else { 0 },
        activity: None,
    });
    Ok(Design::new(space, rows, y, meta)?)
}

/// Reads a design. Without `space`, the sidecar must exist and supplies it.
pub fn read(path: &Path, space: Option<Arc<SearchSpace>>) -> Result<(Design, Option<ProblemRef>)> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Read { path: path.into(), source })?;
    let mpath = meta_path(path);
    let sidecar: Option<Sidecar> = match std::fs::read_to_string(&mpath) {
        Ok(s) => Some(serde_json::from_str(&s).map_err(|e| Error::format(&mpath, e))?),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => None,
        Err(source) => return Err(Error::Read { path: mpath, source }),
    };
    let (space, meta, problem) = match (space, sidecar) {
        (Some(space), sc) => (space, sc.as_ref().map(|s| s.meta.clone()), sc.and_then(|s| s.problem)),
        (None, Some(sc)) => {
            let space = space_json::from_value(sc.space).map_err(|e| Error::format(&mpath, e))?;
            (Arc::new(space), Some(sc.meta), sc.problem)
        }
        (None, None) => {
            return Err(Error::format(path, format!("no search space: {} is missing", mpath.display())));
        }
    };
    Ok((from_csv(path, &text, space, meta)?, problem))
}
