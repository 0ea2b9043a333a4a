//! Objective normalization and the mixed-variable preprocessing pipeline.
//!
//! The pipeline runs, in this order: hierarchy relaxation, min-max
//! normalization of the objective, categorical encoding, and normalization
//! of every decision column to `[0, 1]`. Features are only ever computed on
//! its output.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::ceil;
use crate::sampling::{Design, DesignMeta};
use crate::space::{Cell, Domain};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Encoding {
    #[default]
    None,
    OneHot,
    Target,
}

impl Encoding {
    pub fn name(&self) -> &'static str {
        match self {
            Encoding::None => "none",
            Encoding::OneHot => "one_hot",
            Encoding::Target => "target",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum ColumnKind {
    /// Continuous or integer column scaled by its declared bounds.
    Bounded { lower: f64, upper: f64 },
    /// One-hot indicator, already in `{0, 1}`.
    Indicator,
    /// Target-encoded categorical, min-max scaled over the sample.
    Target,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Column {
    pub name: String,
    /// Index of the source variable in the search space.
    pub variable: usize,
    #[serde(flatten)]
    pub kind: ColumnKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub stages: Vec<String>,
    pub encoding: Encoding,
    pub smoothing: f64,
    pub source: DesignMeta,
}

/// Fully numeric design. After [`normalize_decision`] every entry of `xn`
/// and `yn` lies in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProcessedDesign {
    xn: Vec<Vec<f64>>,
    yn: Vec<f64>,
    columns: Vec<Column>,
    column_map: Vec<Vec<usize>>,
    encoding: Encoding,
    provenance: Provenance,
    normalized: bool,
}

impl ProcessedDesign {
    /// Wraps data that is already numeric and inside the unit cube, e.g. a
    /// synthetic sample. Columns are named `x0, x1, ...`.
    pub fn from_unit(xn: Vec<Vec<f64>>, yn: Vec<f64>) -> Result<Self> {
        let dim = xn.first().map_or(0, Vec::len);
        if xn.is_empty() || dim == 0 {
            return Err(Error::InvalidArgument("empty design".into()));
        }
        let columns = (0..dim)
            .map(|j| Column {
                name: format!("x{j}"),
                variable: j,
                kind: ColumnKind::Bounded {
                    lower: 0.0,
                    upper: 1.0,
                },
            })
            .collect();
        let n = yn.len();
        let pd = Self {
            column_map: (0..dim).map(|j| vec![j]).collect(),
            xn,
            yn,
            columns,
            encoding: Encoding::None,
            provenance: Provenance {
                stages: vec!["external".to_string()],
                encoding: Encoding::None,
                smoothing: 0.0,
                source: DesignMeta {
                    seed: 0,
                    strategy: Default::default(),
                    n,
                    evaluations_spent: n,
                    activity: None,
                },
            },
            normalized: true,
        };
        pd.validate()?;
        Ok(pd)
    }

    pub fn xn(&self) -> &[Vec<f64>] {
        &self.xn
    }

    pub fn yn(&self) -> &[f64] {
        &self.yn
    }

    pub fn n(&self) -> usize {
        self.yn.len()
    }

    /// Number of produced columns `D'`.
    pub fn dim(&self) -> usize {
        self.columns.len()
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    /// For each source variable, the indices of the columns it produced.
    pub fn column_map(&self) -> &[Vec<usize>] {
        &self.column_map
    }

    pub fn encoding(&self) -> Encoding {
        self.encoding
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    /// Copy restricted to the given columns (in the given order).
    pub fn select_columns(&self, cols: &[usize]) -> Result<ProcessedDesign> {
        if let Some(&bad) = cols.iter().find(|&&c| c >= self.dim()) {
            return Err(Error::InvalidArgument(format!("column {bad} out of range")));
        }
        let xn = self
            .xn
            .iter()
            .map(|r| cols.iter().map(|&c| r[c]).collect())
            .collect();
        let columns: Vec<Column> = cols.iter().map(|&c| self.columns[c].clone()).collect();
        Ok(ProcessedDesign {
            xn,
            yn: self.yn.clone(),
            column_map: (0..columns.len()).map(|j| vec![j]).collect(),
            columns,
            encoding: self.encoding,
            provenance: self.provenance.clone(),
            normalized: self.normalized,
        })
    }

    /// Checks the normalized-design invariants.
    pub fn validate(&self) -> Result<()> {
        if self.xn.len() != self.yn.len() {
            return Err(Error::InvalidArgument(format!(
                "{} rows but {} objective values",
                self.xn.len(),
                self.yn.len()
            )));
        }
        let unit = |v: f64| v.is_finite() && (0.0..=1.0).contains(&v);
        for (i, row) in self.xn.iter().enumerate() {
            if row.len() != self.columns.len() {
                return Err(Error::InvalidDesign {
                    row: i,
                    message: format!("expected {} columns", self.columns.len()),
                });
            }
            if self.normalized {
                if let Some(j) = row.iter().position(|&v| !unit(v)) {
                    return Err(Error::InvalidDesign {
                        row: i,
                        message: format!("column {j} value {} outside [0, 1]", row[j]),
                    });
                }
            }
        }
        if self.normalized {
            if let Some(i) = self.yn.iter().position(|&v| !unit(v)) {
                return Err(Error::InvalidDesign {
                    row: i,
                    message: format!("objective {} outside [0, 1]", self.yn[i]),
                });
            }
        }
        for cols in &self.column_map {
            if !cols.iter().all(|&c| self.columns[c].kind == ColumnKind::Indicator) {
                continue;
            }
            for (i, row) in self.xn.iter().enumerate() {
                let s: f64 = cols.iter().map(|&c| row[c]).sum();
                if s != 1.0 {
                    return Err(Error::InvalidDesign {
                        row: i,
                        message: format!("one-hot columns sum to {s}"),
                    });
                }
            }
        }
        Ok(())
    }
}

/// Min-max normalization to `[0, 1]`; a constant vector maps to zeros.
pub fn normalize_objective(y: &[f64]) -> Result<Vec<f64>> {
    if y.is_empty() {
        return Err(Error::InvalidArgument("empty objective vector".into()));
    }
    if let Some(i) = y.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite(i));
    }
    let lo = y.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = y.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let range = hi - lo;
    if range <= 0.0 {
        return Ok(vec![0.0; y.len()]);
    }
    Ok(y.iter().map(|v| (v - lo) / range).collect())
}

fn midpoint(domain: &Domain) -> Cell {
    match domain {
        Domain::Continuous { lower, upper } => Cell::Real(0.5 * (lower + upper)),
        // ties toward the lower value, as in sampling
        Domain::Integer { lower, upper } => {
            Cell::Int(ceil(0.5 * (*lower as f64 + *upper as f64) - 0.5) as i64)
        }
        Domain::Categorical { .. } => Cell::Cat(0),
    }
}

/// Fills hierarchy-inactive missing cells so every row is complete.
///
/// Continuous and integer cells get the midpoint of their bounds,
/// categorical cells the first category. The activity mask is stored in
/// the design meta when the space has conditions.
pub fn relax_hierarchy(d: &Design) -> Result<Design> {
    let space = d.space();
    let mut rows = Vec::with_capacity(d.n());
    let mut mask = Vec::with_capacity(d.n());
    for (r, row) in d.rows().iter().enumerate() {
        let active = space.activity(row);
        let mut out = row.clone();
        for (j, cell) in out.iter_mut().enumerate() {
            if cell.is_missing() {
                if active[j] {
                    return Err(Error::InvalidDesign {
                        row: r,
                        message: format!("missing value for active variable `{}`", space.variable(j).name),
                    });
                }
                *cell = midpoint(&space.variable(j).domain);
            }
        }
        rows.push(out);
        mask.push(active);
    }
    let mut meta = d.meta.clone();
    if space.has_conditions() {
        meta.activity = Some(mask);
    }
    d.with_rows(rows, meta)
}

fn require_objective(d: &Design) -> Result<&[f64]> {
    d.y().ok_or(Error::NotEvaluated)
}

fn numeric_cell(d: &Design, r: usize, j: usize) -> Result<f64> {
    d.rows()[r][j].as_f64().ok_or_else(|| Error::InvalidDesign {
        row: r,
        message: format!("missing value for `{}`; relax the hierarchy first", d.space().variable(j).name),
    })
}

fn category_cell(d: &Design, r: usize, j: usize) -> Result<usize> {
    match d.rows()[r][j] {
        Cell::Cat(c) => Ok(c),
        _ => Err(Error::InvalidDesign {
            row: r,
            message: format!("missing value for `{}`; relax the hierarchy first", d.space().variable(j).name),
        }),
    }
}

fn pending(d: &Design, encoding: Encoding, columns: Vec<Column>, column_map: Vec<Vec<usize>>, xn: Vec<Vec<f64>>, smoothing: f64) -> Result<ProcessedDesign> {
    let y = require_objective(d)?;
    Ok(ProcessedDesign {
        xn,
        yn: y.to_vec(),
        columns,
        column_map,
        encoding,
        provenance: Provenance {
            stages: vec![format!("encode:{}", encoding.name())],
            encoding,
            smoothing,
            source: d.meta.clone(),
        },
        normalized: false,
    })
}

fn bounded_column(d: &Design, j: usize) -> Column {
    let v = d.space().variable(j);
    let (lower, upper) = v.bounds().expect("numeric variable");
    Column {
        name: v.name.clone(),
        variable: j,
        kind: ColumnKind::Bounded { lower, upper },
    }
}

/// Numeric pass-through; fails on categorical variables.
pub fn encode_none(d: &Design) -> Result<ProcessedDesign> {
    require_objective(d)?;
    if let Some(v) = d.space().variables().iter().find(|v| v.is_categorical()) {
        return Err(Error::EncodingRequired(v.name.clone()));
    }
    let dim = d.space().dim();
    let mut xn = vec![vec![0.0; dim]; d.n()];
    for (r, row) in xn.iter_mut().enumerate() {
        for (j, x) in row.iter_mut().enumerate() {
            *x = numeric_cell(d, r, j)?;
        }
    }
    let columns = (0..dim).map(|j| bounded_column(d, j)).collect();
    pending(d, Encoding::None, columns, (0..dim).map(|j| vec![j]).collect(), xn, 0.0)
}

/// Each categorical variable with `c` categories becomes `c` indicator
/// columns named `<var>=<category>`.
pub fn encode_one_hot(d: &Design) -> Result<ProcessedDesign> {
    require_objective(d)?;
    let space = d.space();
    let mut columns = Vec::new();
    let mut column_map = Vec::with_capacity(space.dim());
    for (j, v) in space.variables().iter().enumerate() {
        let start = columns.len();
        match v.categories() {
            Some(cats) => columns.extend(cats.iter().map(|c| Column {
                name: format!("{}={}", v.name, c),
                variable: j,
                kind: ColumnKind::Indicator,
            })),
            None => columns.push(bounded_column(d, j)),
        }
        column_map.push((start..columns.len()).collect::<Vec<_>>());
    }
    let mut xn = vec![vec![0.0; columns.len()]; d.n()];
    for (r, row) in xn.iter_mut().enumerate() {
        for (j, v) in space.variables().iter().enumerate() {
            let cols = &column_map[j];
            if v.is_categorical() {
                row[cols[category_cell(d, r, j)?]] = 1.0;
            } else {
                row[cols[0]] = numeric_cell(d, r, j)?;
            }
        }
    }
    pending(d, Encoding::OneHot, columns, column_map, xn, 0.0)
}

/// Replaces each category by the smoothed mean objective of its rows:
/// `(sum + m * mean) / (count + m)`. Expects an already normalized `y`.
pub fn encode_target(d: &Design, smoothing: f64) -> Result<ProcessedDesign> {
    if !(smoothing.is_finite() && smoothing >= 0.0) {
        return Err(Error::InvalidArgument(format!("smoothing must be >= 0, got {smoothing}")));
    }
    let y = require_objective(d)?;
    let space = d.space();
    let global = y.iter().sum::<f64>() / y.len() as f64;
    let dim = space.dim();
    let mut xn = vec![vec![0.0; dim]; d.n()];
    let mut columns = Vec::with_capacity(dim);
    for (j, v) in space.variables().iter().enumerate() {
        match v.categories() {
            Some(cats) => {
                let mut sum = vec![0.0; cats.len()];
                let mut count = vec![0usize; cats.len()];
                for r in 0..d.n() {
                    let c = category_cell(d, r, j)?;
                    sum[c] += y[r];
                    count[c] += 1;
                }
                let mut value = Vec::with_capacity(cats.len());
                for (c, label) in cats.iter().enumerate() {
                    if count[c] == 0 && smoothing == 0.0 {
                        return Err(Error::EmptyCategory {
                            variable: v.name.clone(),
                            category: label.clone(),
                        });
                    }
                    value.push((sum[c] + smoothing * global) / (count[c] as f64 + smoothing));
                }
                for (r, row) in xn.iter_mut().enumerate() {
                    row[j] = value[category_cell(d, r, j)?];
                }
                columns.push(Column {
                    name: v.name.clone(),
                    variable: j,
                    kind: ColumnKind::Target,
                });
            }
            None => {
                for (r, row) in xn.iter_mut().enumerate() {
                    row[j] = numeric_cell(d, r, j)?;
                }
                columns.push(bounded_column(d, j));
            }
        }
    }
    pending(d, Encoding::Target, columns, (0..dim).map(|j| vec![j]).collect(), xn, smoothing)
}

pub fn encode(d: &Design, encoding: Encoding, smoothing: f64) -> Result<ProcessedDesign> {
    match encoding {
        Encoding::None => encode_none(d),
        Encoding::OneHot => encode_one_hot(d),
        Encoding::Target => encode_target(d, smoothing),
    }
}

/// Scales every decision column to `[0, 1]`.
///
/// Numeric columns use their declared bounds, indicators pass through, and
/// target-encoded columns are min-max scaled over the sample (a constant
/// column becomes zeros). Afterwards all numeric columns report `[0, 1]`
/// bounds, so applying this twice is the identity.
pub fn normalize_decision(pd: &ProcessedDesign) -> Result<ProcessedDesign> {
    let mut out = pd.clone();
    for (c, col) in pd.columns.iter().enumerate() {
        match col.kind {
            ColumnKind::Bounded { lower, upper } => {
                let width = upper - lower;
                for row in out.xn.iter_mut() {
                    let v = row[c];
                    if !(lower..=upper).contains(&v) {
                        return Err(Error::OutOfBounds {
                            variable: col.name.clone(),
                            value: v,
                            lower,
                            upper,
                        });
                    }
                    row[c] = if width > 0.0 { ((v - lower) / width).min(1.0) } else { 0.0 };
                }
                out.columns[c].kind = ColumnKind::Bounded {
                    lower: 0.0,
                    upper: 1.0,
                };
            }
            ColumnKind::Indicator => {}
            ColumnKind::Target => {
                let values: Vec<f64> = pd.xn.iter().map(|r| r[c]).collect();
                let scaled = normalize_objective(&values)?;
                for (row, s) in out.xn.iter_mut().zip(scaled) {
                    row[c] = s;
                }
            }
        }
    }
    out.normalized = true;
    out.provenance.stages.push("normalize_decision".to_string());
    out.validate()?;
    Ok(out)
}

/// Relax, normalize `y`, encode, normalize decisions; stages are recorded
/// in the provenance.
pub fn preprocess_pipeline(d: &Design, encoding: Encoding, smoothing: f64) -> Result<ProcessedDesign> {
    let y = require_objective(d)?;
    let relaxed = relax_hierarchy(d)?;
    let yn = normalize_objective(y)?;
    let normalized = relaxed.with_objective(yn)?;
    let encoded = encode(&normalized, encoding, smoothing)?;
    let mut out = normalize_decision(&encoded)?;
    let mut stages = vec!["relax_hierarchy".to_string(), "normalize_objective".to_string()];
    stages.append(&mut out.provenance.stages);
    out.provenance.stages = stages;
    out.provenance.source = d.meta.clone();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::sync::Arc;

    use crate::sampling::{create_initial_design, SamplingStrategy};
    use crate::space::{ConditionValue, SearchSpace, VariableSpec};

    fn meta(n: usize) -> DesignMeta {
        DesignMeta {
            seed: 0,
            strategy: SamplingStrategy::Uniform,
            n,
            evaluations_spent: n,
            activity: None,
        }
    }

    fn design(vars: Vec<VariableSpec>, rows: Vec<Vec<Cell>>, y: Vec<f64>) -> Design {
        let n = rows.len();
        Design::new(Arc::new(SearchSpace::new(vars).unwrap()), rows, Some(y), meta(n)).unwrap()
    }

    #[test]
    fn objective_normalization() {
        assert_eq!(normalize_objective(&[2.0, 4.0, 6.0]).unwrap(), vec![0.0, 0.5, 1.0]);
        assert_eq!(normalize_objective(&[5.0, 5.0, 5.0]).unwrap(), vec![0.0; 3]);
        assert!(matches!(normalize_objective(&[1.0, f64::NAN]), Err(Error::NonFinite(1))));
        assert!(normalize_objective(&[]).is_err());
    }

    #[test]
    fn relax_without_conditions_is_identity() {
        let d = design(
            vec![VariableSpec::continuous("a", 0.0, 1.0)],
            vec![vec![Cell::Real(0.3)], vec![Cell::Real(0.7)]],
            vec![1.0, 2.0],
        );
        assert_eq!(relax_hierarchy(&d).unwrap(), d);
    }

    #[test]
    fn relax_imputes_inactive_cells() {
        let vars = vec![
            VariableSpec::categorical("kind", ["p", "q"]),
            VariableSpec::continuous("w", 0.0, 10.0)
                .with_condition("kind", vec![ConditionValue::Label("q".into())]),
            VariableSpec::categorical("c", ["a", "b", "c"])
                .with_condition("kind", vec![ConditionValue::Label("q".into())]),
            VariableSpec::integer("k", 1, 4).with_condition("kind", vec![ConditionValue::Label("q".into())]),
        ];
        let rows = vec![
            vec![Cell::Cat(0), Cell::Missing, Cell::Missing, Cell::Missing],
            vec![Cell::Cat(1), Cell::Real(2.0), Cell::Cat(2), Cell::Int(4)],
        ];
        let d = design(vars.clone(), rows, vec![0.0, 1.0]);
        let r = relax_hierarchy(&d).unwrap();
        assert_eq!(r.rows()[0], vec![Cell::Cat(0), Cell::Real(5.0), Cell::Cat(0), Cell::Int(2)]);
        assert_eq!(r.rows()[1], d.rows()[1]);
        let mask = r.meta.activity.as_ref().unwrap();
        assert_eq!(mask[0], vec![true, false, false, false]);
        assert_eq!(mask[1], vec![true; 4]);

        let bad = design(
            vars,
            vec![vec![Cell::Cat(1), Cell::Missing, Cell::Cat(0), Cell::Int(1)]],
            vec![0.0],
        );
        assert!(matches!(relax_hierarchy(&bad), Err(Error::InvalidDesign { row: 0, .. })));
    }

    #[test]
    fn one_hot_columns() {
        let d = design(
            vec![
                VariableSpec::categorical("u", ["a", "b"]),
                VariableSpec::categorical("v", ["x", "y", "z"]),
            ],
            vec![vec![Cell::Cat(1), Cell::Cat(0)], vec![Cell::Cat(0), Cell::Cat(2)]],
            vec![0.0, 1.0],
        );
        let pd = encode_one_hot(&d).unwrap();
        assert_eq!(pd.dim(), 5);
        assert_eq!(pd.xn()[0], vec![0.0, 1.0, 1.0, 0.0, 0.0]);
        assert_eq!(pd.columns()[3].name, "v=y");
        assert_eq!(pd.column_map(), &[vec![0, 1], vec![2, 3, 4]]);

        let d = design(
            vec![VariableSpec::categorical("v", ["a", "b", "c"])],
            vec![vec![Cell::Cat(1)]],
            vec![0.0],
        );
        assert_eq!(encode_one_hot(&d).unwrap().xn()[0], vec![0.0, 1.0, 0.0]);
    }

    #[test]
    fn continuous_column_map_is_identity() {
        let space = Arc::new(SearchSpace::continuous_box(3, -5.0, 5.0).unwrap());
        let d = create_initial_design(space, 10, SamplingStrategy::Uniform, 1).unwrap();
        let d = d.with_objective((0..10).map(|i| i as f64).collect()).unwrap();
        let pd = encode_one_hot(&d).unwrap();
        assert_eq!(pd.column_map(), &[vec![0], vec![1], vec![2]]);
    }

    #[test]
    fn target_encoding_group_means() {
        let vars = vec![VariableSpec::categorical("c", ["a", "b"])];
        let rows = vec![vec![Cell::Cat(0)], vec![Cell::Cat(0)], vec![Cell::Cat(1)]];
        let yn = vec![0.2, 0.4, 0.8];
        let d = design(vars.clone(), rows.clone(), yn.clone());
        let pd = encode_target(&d, 0.0).unwrap();
        // oracle: per-group arithmetic mean
        let mean_a = (yn[0] + yn[1]) / 2.0;
        assert!((pd.xn()[0][0] - mean_a).abs() < 1e-15);
        assert!((pd.xn()[1][0] - 0.3).abs() < 1e-15);
        assert_eq!(pd.xn()[2][0], 0.8);

        let pd = encode_target(&d, 1e12).unwrap();
        let global = (0.2 + 0.4 + 0.8) / 3.0;
        for r in pd.xn() {
            assert!((r[0] - global).abs() < 1e-9);
        }

        let single = design(
            vec![VariableSpec::categorical("c", ["only"])],
            vec![vec![Cell::Cat(0)], vec![Cell::Cat(0)]],
            vec![0.0, 1.0],
        );
        assert_eq!(encode_target(&single, 0.0).unwrap().xn()[0][0], 0.5);

        let unseen = design(vars, vec![vec![Cell::Cat(0)]], vec![0.0]);
        assert!(matches!(encode_target(&unseen, 0.0), Err(Error::EmptyCategory { .. })));
        assert!(encode_target(&unseen, 2.0).is_ok());
    }

    #[test]
    fn decision_normalization() {
        let d = design(
            vec![
                VariableSpec::continuous("a", -5.0, 5.0),
                VariableSpec::integer("k", 1, 5),
                VariableSpec::categorical("c", ["p", "q", "r"]),
            ],
            vec![
                vec![Cell::Real(0.0), Cell::Int(5), Cell::Cat(1)],
                vec![Cell::Real(5.0), Cell::Int(1), Cell::Cat(0)],
            ],
            vec![0.0, 1.0],
        );
        let pd = normalize_decision(&encode_one_hot(&d).unwrap()).unwrap();
        assert_eq!(pd.xn()[0], vec![0.5, 1.0, 0.0, 1.0, 0.0]);
        assert_eq!(pd.xn()[1], vec![1.0, 0.0, 1.0, 0.0, 0.0]);
        let again = normalize_decision(&pd).unwrap();
        assert_eq!(again.xn(), pd.xn());
    }

    #[test]
    fn out_of_bounds_is_rejected() {
        let pd = ProcessedDesign {
            xn: vec![vec![2.0]],
            yn: vec![0.0],
            columns: vec![Column {
                name: "a".into(),
                variable: 0,
                kind: ColumnKind::Bounded {
                    lower: 0.0,
                    upper: 1.0,
                },
            }],
            column_map: vec![vec![0]],
            encoding: Encoding::None,
            provenance: Provenance {
                stages: vec![],
                encoding: Encoding::None,
                smoothing: 0.0,
                source: meta(1),
            },
            normalized: false,
        };
        assert!(matches!(normalize_decision(&pd), Err(Error::OutOfBounds { .. })));
    }

    #[test]
    fn pipeline_continuous_and_guard() {
        let d = design(
            vec![VariableSpec::continuous("a", -5.0, 5.0), VariableSpec::continuous("b", 0.0, 2.0)],
            vec![
                vec![Cell::Real(-5.0), Cell::Real(1.0)],
                vec![Cell::Real(2.5), Cell::Real(2.0)],
                vec![Cell::Real(0.0), Cell::Real(0.5)],
            ],
            vec![10.0, 30.0, 20.0],
        );
        let pd = preprocess_pipeline(&d, Encoding::None, 0.0).unwrap();
        assert_eq!(pd.xn(), &[vec![0.0, 0.5], vec![0.75, 1.0], vec![0.5, 0.25]]);
        assert_eq!(pd.yn(), &[0.0, 1.0, 0.5]);
        assert_eq!(
            pd.provenance().stages,
            vec!["relax_hierarchy", "normalize_objective", "encode:none", "normalize_decision"]
        );

        let cat = design(
            vec![VariableSpec::categorical("c", ["p", "q"])],
            vec![vec![Cell::Cat(0)], vec![Cell::Cat(1)]],
            vec![0.0, 1.0],
        );
        assert!(matches!(preprocess_pipeline(&cat, Encoding::None, 0.0), Err(Error::EncodingRequired(_))));
        let pd = preprocess_pipeline(&cat, Encoding::Target, 0.0).unwrap();
        assert_eq!(pd.dim(), 1);
    }
}
