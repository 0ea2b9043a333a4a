//! Initial designs: space-filling samples over mixed search spaces.

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::ceil;
use crate::sobol::{DirectionNumbers, EmbeddedJoeKuo, SobolSequence};
use crate::space::{Cell, Domain, Problem, SearchSpace};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplingStrategy {
    Uniform,
    #[default]
    LatinHypercube,
    Sobol,
}

impl SamplingStrategy {
    pub fn name(&self) -> &'static str {
        match self {
            SamplingStrategy::Uniform => "uniform",
            SamplingStrategy::LatinHypercube => "latin_hypercube",
            SamplingStrategy::Sobol => "sobol",
        }
    }
}

/// Sample size used when none is given: 50 points per dimension.
pub fn default_sample_size(dim: usize) -> usize {
    50 * dim
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignMeta {
    pub seed: u64,
    pub strategy: SamplingStrategy,
    pub n: usize,
    pub evaluations_spent: usize,
    /// Per (row, variable) activity, filled in by hierarchy relaxation.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub activity: Option<Vec<Vec<bool>>>,
}

/// An initial design: typed decision rows plus optional objective values.
#[derive(Debug, Clone, PartialEq)]
pub struct Design {
    space: Arc<SearchSpace>,
    rows: Vec<Vec<Cell>>,
    y: Option<Vec<f64>>,
    pub meta: DesignMeta,
}

impl Design {
    /// Validates row shapes, box constraints, category membership and `y`.
    pub fn new(
        space: Arc<SearchSpace>,
        rows: Vec<Vec<Cell>>,
        y: Option<Vec<f64>>,
        meta: DesignMeta,
    ) -> Result<Self> {
        for (r, row) in rows.iter().enumerate() {
            if row.len() != space.dim() {
                return Err(Error::InvalidDesign {
                    row: r,
                    message: format!("expected {} cells, got {}", space.dim(), row.len()),
                });
            }
            for (j, cell) in row.iter().enumerate() {
                space
                    .check_cell(j, cell)
                    .map_err(|message| Error::InvalidDesign { row: r, message })?;
            }
        }
        if let Some(y) = &y {
            if y.len() != rows.len() {
                return Err(Error::InvalidDesign {
                    row: y.len().min(rows.len()),
                    message: format!("{} objective values for {} rows", y.len(), rows.len()),
                });
            }
            if let Some(row) = y.iter().position(|v| !v.is_finite()) {
                return Err(Error::NonFiniteObjective { row, value: y[row] });
            }
        }
        Ok(Self { space, rows, y, meta })
    }

    pub fn space(&self) -> &SearchSpace {
        &self.space
    }

    pub fn space_arc(&self) -> &Arc<SearchSpace> {
        &self.space
    }

    pub fn rows(&self) -> &[Vec<Cell>] {
        &self.rows
    }

    pub fn n(&self) -> usize {
        self.rows.len()
    }

    pub fn y(&self) -> Option<&[f64]> {
        self.y.as_deref()
    }

    pub fn is_evaluated(&self) -> bool {
        self.y.is_some()
    }

    /// Same rows with objective values replaced.
    pub fn with_objective(&self, y: Vec<f64>) -> Result<Design> {
        let mut meta = self.meta.clone();
        meta.evaluations_spent = self.rows.len();
        Design::new(self.space.clone(), self.rows.clone(), Some(y), meta)
    }

    pub(crate) fn with_rows(&self, rows: Vec<Vec<Cell>>, meta: DesignMeta) -> Result<Design> {
        Design::new(self.space.clone(), rows, self.y.clone(), meta)
    }
}

/// Nearest integer with ties toward the lower value.
fn round_half_down(v: f64) -> f64 {
    ceil(v - 0.5)
}

/// Unit-cube samples, `n` rows by `k` columns.
fn unit_samples(
    n: usize,
    k: usize,
    strategy: SamplingStrategy,
    rng: &mut ChaCha8Rng,
    directions: &dyn DirectionNumbers,
) -> Result<Vec<Vec<f64>>> {
    let mut u = vec![vec![0.0; k]; n];
    if k == 0 {
        return Ok(u);
    }
    match strategy {
        SamplingStrategy::Uniform => {
            for row in u.iter_mut() {
                for x in row.iter_mut() {
                    *x = rng.random::<f64>();
                }
            }
        }
        SamplingStrategy::LatinHypercube => {
            let mut perm: Vec<usize> = (0..n).collect();
            for j in 0..k {
                perm.shuffle(rng);
                for (row, &bin) in u.iter_mut().zip(&perm) {
                    row[j] = (bin as f64 + rng.random::<f64>()) / n as f64;
                }
            }
        }
        SamplingStrategy::Sobol => {
            let seq = SobolSequence::new(k, directions).ok_or(Error::StrategyUnavailable {
                strategy: "sobol",
                dim: k,
            })?;
            let shift = (0..k).map(|_| rng.random::<u32>()).collect();
            let mut seq = seq.with_digital_shift(shift);
            for row in u.iter_mut() {
                seq.next_into(row);
            }
        }
    }
    Ok(u)
}

/// Category indices for one column: every count within one of `n / c`.
fn stratified_categories(n: usize, c: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut column: Vec<usize> = (0..n - n % c).map(|i| i % c).collect();
    let mut extra: Vec<usize> = (0..c).collect();
    extra.shuffle(rng);
    column.extend_from_slice(&extra[..n % c]);
    column.shuffle(rng);
    column
}

/// Unevaluated design of `n` rows drawn with `strategy`.
///
/// Uses the embedded 64-dimensional Sobol table; see
/// [`create_initial_design_with`] for larger direction-number sets.
pub fn create_initial_design(
    space: Arc<SearchSpace>,
    n: usize,
    strategy: SamplingStrategy,
    seed: u64,
) -> Result<Design> {
    create_initial_design_with(space, n, strategy, seed, &EmbeddedJoeKuo)
}

pub fn create_initial_design_with(
    space: Arc<SearchSpace>,
    n: usize,
    strategy: SamplingStrategy,
    seed: u64,
    directions: &dyn DirectionNumbers,
) -> Result<Design> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("design size must be >= 2, got {n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let numeric: Vec<usize> = (0..space.dim())
        .filter(|&j| !space.variable(j).is_categorical())
        .collect();
    let u = unit_samples(n, numeric.len(), strategy, &mut rng, directions)?;

    let mut rows = vec![vec![Cell::Missing; space.dim()]; n];
    for (col, &j) in numeric.iter().enumerate() {
        match space.variable(j).domain {
            Domain::Continuous { lower, upper } => {
                for (row, ur) in rows.iter_mut().zip(&u) {
                    row[j] = Cell::Real((lower + ur[col] * (upper - lower)).min(upper));
                }
            }
            Domain::Integer { lower, upper } => {
                let (lo, hi) = (lower as f64, upper as f64);
                for (row, ur) in rows.iter_mut().zip(&u) {
                    let v = round_half_down(lo + ur[col] * (hi - lo)).clamp(lo, hi);
                    row[j] = Cell::Int(v as i64);
                }
            }
            Domain::Categorical { .. } => unreachable!(),
        }
    }
    for j in 0..space.dim() {
        if let Some(cats) = space.variable(j).categories() {
            let column = stratified_categories(n, cats.len(), &mut rng);
            for (row, c) in rows.iter_mut().zip(column) {
                row[j] = Cell::Cat(c);
            }
        }
    }
    let meta = DesignMeta {
        seed,
        strategy,
        n,
        evaluations_spent: 0,
        activity: None,
    };
    Design::new(space, rows, None, meta)
}

/// Evaluates every row of `design` on `problem`, in row order.
pub fn evaluate_design(problem: &Problem, design: &Design) -> Result<Design> {
    if *problem.space != *design.space {
        return Err(Error::InvalidArgument(String::from(
            "design space does not match the problem's search space",
        )));
    }
    if design.is_evaluated() {
        return Err(Error::AlreadyEvaluated);
    }
    let mut y = Vec::with_capacity(design.n());
    for (row, x) in design.rows.iter().enumerate() {
        let value = problem.evaluate(x);
        if !value.is_finite() {
            return Err(Error::NonFiniteObjective { row, value });
        }
        y.push(value);
    }
    design.with_objective(y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{builtin_problem, BuiltinFunction, ObjectiveFn, VariableSpec};

    fn unit_line() -> Arc<SearchSpace> {
        Arc::new(SearchSpace::new(vec![VariableSpec::continuous("x", 0.0, 1.0)]).unwrap())
    }

    #[test]
    fn default_size_is_fifty_per_dimension() {
        assert_eq!(default_sample_size(2), 100);
    }

    #[test]
    fn lhs_one_point_per_bin() {
        for seed in 0..20 {
            let d = create_initial_design(unit_line(), 4, SamplingStrategy::LatinHypercube, seed)
                .unwrap();
            let mut bins = [0; 4];
            for r in d.rows() {
                let x = r[0].as_f64().unwrap();
                bins[((x * 4.0) as usize).min(3)] += 1;
            }
            assert_eq!(bins, [1, 1, 1, 1]);
        }
    }

    #[test]
    fn categorical_is_stratified() {
        let space = Arc::new(SearchSpace::new(vec![VariableSpec::categorical("c", ["a", "b"])]).unwrap());
        let d = create_initial_design(space, 10, SamplingStrategy::Uniform, 3).unwrap();
        let a = d.rows().iter().filter(|r| r[0] == Cell::Cat(0)).count();
        assert_eq!(a, 5);

        let space = Arc::new(
            SearchSpace::new(vec![VariableSpec::categorical("c", ["a", "b", "c"])]).unwrap(),
        );
        let d = create_initial_design(space, 11, SamplingStrategy::Sobol, 3).unwrap();
        for c in 0..3 {
            let k = d.rows().iter().filter(|r| r[0] == Cell::Cat(c)).count();
            assert!((3..=4).contains(&k));
        }
    }

    #[test]
    fn integers_are_rounded_and_clamped() {
        let space = Arc::new(SearchSpace::new(vec![VariableSpec::integer("k", 1, 5)]).unwrap());
        let d = create_initial_design(space, 200, SamplingStrategy::Uniform, 9).unwrap();
        let mut seen = [false; 5];
        for r in d.rows() {
            let Cell::Int(k) = r[0] else { panic!() };
            assert!((1..=5).contains(&k));
            seen[(k - 1) as usize] = true;
        }
        assert!(seen.iter().all(|&s| s));
        assert_eq!(round_half_down(2.5), 2.0);
        assert_eq!(round_half_down(2.5000001), 3.0);
        assert_eq!(round_half_down(-0.5), -1.0);
    }

    #[test]
    fn deterministic_per_seed() {
        let space = Arc::new(SearchSpace::continuous_box(3, -5.0, 5.0).unwrap());
        for s in [SamplingStrategy::Uniform, SamplingStrategy::LatinHypercube, SamplingStrategy::Sobol] {
            let a = create_initial_design(space.clone(), 30, s, 11).unwrap();
            let b = create_initial_design(space.clone(), 30, s, 11).unwrap();
            let c = create_initial_design(space.clone(), 30, s, 12).unwrap();
            assert_eq!(a, b);
            assert_ne!(a.rows(), c.rows());
        }
    }

    #[test]
    fn rejects_small_n_and_oversized_sobol() {
        assert!(create_initial_design(unit_line(), 1, SamplingStrategy::Uniform, 0).is_err());
        let big = Arc::new(SearchSpace::continuous_box(65, 0.0, 1.0).unwrap());
        assert!(matches!(
            create_initial_design(big, 10, SamplingStrategy::Sobol, 0),
            Err(Error::StrategyUnavailable { dim: 65, .. })
        ));
    }

    #[test]
    fn evaluation_fills_y_in_row_order() {
        let p = builtin_problem(BuiltinFunction::Sphere, 0, 2).unwrap();
        let meta = DesignMeta {
            seed: 0,
            strategy: SamplingStrategy::Uniform,
            n: 2,
            evaluations_spent: 0,
            activity: None,
        };
        let rows = vec![
            vec![Cell::Real(0.0), Cell::Real(0.0)],
            vec![Cell::Real(1.0), Cell::Real(1.0)],
        ];
        let d = Design::new(p.space.clone(), rows.clone(), None, meta.clone()).unwrap();
        let e = evaluate_design(&p, &d).unwrap();
        assert_eq!(e.y().unwrap(), &[0.0, 2.0]);
        assert_eq!(e.meta.evaluations_spent, 2);
        assert_eq!(e.rows(), d.rows());
        assert!(matches!(evaluate_design(&p, &e), Err(Error::AlreadyEvaluated)));

        let slope = builtin_problem(BuiltinFunction::LinearSlope, 0, 2).unwrap();
        let rows = vec![
            vec![Cell::Real(1.0), Cell::Real(2.0)],
            vec![Cell::Real(0.0), Cell::Real(0.0)],
        ];
        let d = Design::new(slope.space.clone(), rows, None, meta).unwrap();
        assert_eq!(evaluate_design(&slope, &d).unwrap().y().unwrap(), &[3.0, 0.0]);
    }

    #[test]
    fn non_finite_objective_reports_row() {
        let space = Arc::new(SearchSpace::continuous_box(1, 0.0, 1.0).unwrap());
        let f: ObjectiveFn = Arc::new(|x: &[Cell]| {
            let v = x[0].as_f64().unwrap();
            if v > 0.5 { f64::NAN } else { v }
        });
        let p = Problem::new("nan", 0, space.clone(), f, None);
        let d = create_initial_design(space, 10, SamplingStrategy::LatinHypercube, 1).unwrap();
        let bad = d.rows().iter().position(|r| r[0].as_f64().unwrap() > 0.5).unwrap();
        assert!(matches!(evaluate_design(&p, &d), Err(Error::NonFiniteObjective { row, .. }) if row == bad));
    }

    #[test]
    fn rows_respect_bounds() {
        let space = Arc::new(
            SearchSpace::new(vec![
                VariableSpec::continuous("a", -2.0, 3.0),
                VariableSpec::integer("b", -3, 3),
                VariableSpec::categorical("c", ["p", "q", "r"]),
            ])
            .unwrap(),
        );
        for s in [SamplingStrategy::Uniform, SamplingStrategy::LatinHypercube, SamplingStrategy::Sobol] {
            let d = create_initial_design(space.clone(), 64, s, 5).unwrap();
            for r in d.rows() {
                for (j, c) in r.iter().enumerate() {
                    assert!(space.check_cell(j, c).is_ok());
                    assert!(!c.is_missing());
                }
            }
        }
    }
}
