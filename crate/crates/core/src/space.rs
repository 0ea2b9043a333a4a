//! Search spaces, built-in benchmark problems and objective transforms.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::{cos, pow};

/// Value domain of a single decision variable.
#[derive(Debug, Clone, PartialEq)]
pub enum Domain {
    Continuous { lower: f64, upper: f64 },
    Integer { lower: i64, upper: i64 },
    Categorical { categories: Vec<String> },
}

impl Domain {
    pub fn kind_name(&self) -> &'static str {
        match self {
            Domain::Continuous { .. } => "continuous",
            Domain::Integer { .. } => "integer",
            Domain::Categorical { .. } => "categorical",
        }
    }
}

/// A parent value that activates a conditional variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConditionValue {
    Integer(i64),
    Label(String),
}

/// Activation condition: the variable is active iff its parent is active and
/// takes one of `values`.
#[derive(Debug, Clone, PartialEq)]
pub struct Condition {
    pub parent: String,
    pub values: Vec<ConditionValue>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VariableSpec {
    pub name: String,
    pub domain: Domain,
    pub condition: Option<Condition>,
}

impl VariableSpec {
    pub fn continuous(name: impl Into<String>, lower: f64, upper: f64) -> Self {
        Self {
            name: name.into(),
            domain: Domain::Continuous { lower, upper },
            condition: None,
        }
    }

    pub fn integer(name: impl Into<String>, lower: i64, upper: i64) -> Self {
        Self {
            name: name.into(),
            domain: Domain::Integer { lower, upper },
            condition: None,
        }
    }

    pub fn categorical<S: Into<String>>(
        name: impl Into<String>,
        categories: impl IntoIterator<Item = S>,
    ) -> Self {
        Self {
            name: name.into(),
            domain: Domain::Categorical {
                categories: categories.into_iter().map(Into::into).collect(),
            },
            condition: None,
        }
    }

    pub fn with_condition(mut self, parent: impl Into<String>, values: Vec<ConditionValue>) -> Self {
        self.condition = Some(Condition {
            parent: parent.into(),
            values,
        });
        self
    }

    /// Numeric bounds for continuous and integer variables.
    pub fn bounds(&self) -> Option<(f64, f64)> {
        match &self.domain {
            Domain::Continuous { lower, upper } => Some((*lower, *upper)),
            Domain::Integer { lower, upper } => Some((*lower as f64, *upper as f64)),
            Domain::Categorical { .. } => None,
        }
    }

    pub fn categories(&self) -> Option<&[String]> {
        match &self.domain {
            Domain::Categorical { categories } => Some(categories),
            _ => None,
        }
    }

    pub fn is_categorical(&self) -> bool {
        matches!(self.domain, Domain::Categorical { .. })
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidSpace(format!("variable `{}`: {msg}", self.name)));
        if self.name.is_empty() {
            return Err(Error::InvalidSpace("empty variable name".into()));
        }
        match &self.domain {
            Domain::Continuous { lower, upper } => {
                if !(lower.is_finite() && upper.is_finite()) {
                    return bad("bounds must be finite".into());
                }
                if lower >= upper {
                    return bad(format!("lower {lower} must be < upper {upper}"));
                }
            }
            Domain::Integer { lower, upper } => {
                if lower > upper {
                    return bad(format!("lower {lower} must be <= upper {upper}"));
                }
            }
            Domain::Categorical { categories } => {
                if categories.is_empty() {
                    return bad("categories must be non-empty".into());
                }
                for (i, c) in categories.iter().enumerate() {
                    if c.is_empty() {
                        return bad("empty category label".into());
                    }
                    if categories[..i].contains(c) {
                        return bad(format!("duplicate category `{c}`"));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Ordered, validated collection of decision variables.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchSpace {
    variables: Vec<VariableSpec>,
    order: Vec<usize>,
}

impl SearchSpace {
    pub fn new(variables: Vec<VariableSpec>) -> Result<Self> {
        if variables.is_empty() {
            return Err(Error::InvalidSpace("a search space needs at least one variable".into()));
        }
        for (i, v) in variables.iter().enumerate() {
            v.validate()?;
            if variables[..i].iter().any(|w| w.name == v.name) {
                return Err(Error::InvalidSpace(format!("duplicate variable name `{}`", v.name)));
            }
        }
        for v in &variables {
            let Some(cond) = &v.condition else { continue };
            let parent = variables
                .iter()
                .find(|w| w.name == cond.parent)
                .ok_or_else(|| {
                    Error::InvalidSpace(format!(
                        "variable `{}`: condition parent `{}` does not exist",
                        v.name, cond.parent
                    ))
                })?;
            if cond.values.is_empty() {
                return Err(Error::InvalidSpace(format!(
                    "variable `{}`: empty activating value set",
                    v.name
                )));
            }
            for value in &cond.values {
                let ok = match (&parent.domain, value) {
                    (Domain::Categorical { categories }, ConditionValue::Label(l)) => {
                        categories.contains(l)
                    }
                    (Domain::Integer { lower, upper }, ConditionValue::Integer(k)) => {
                        lower <= k && k <= upper
                    }
                    (Domain::Continuous { .. }, _) => {
                        return Err(Error::InvalidSpace(format!(
                            "variable `{}`: continuous parent `{}` cannot carry a condition",
                            v.name, parent.name
                        )))
                    }
                    _ => false,
                };
                if !ok {
                    return Err(Error::InvalidSpace(format!(
                        "variable `{}`: activating value {value:?} invalid for parent `{}`",
                        v.name, parent.name
                    )));
                }
            }
        }
        let order = topological_order(&variables)?;
        Ok(Self { variables, order })
    }

    /// `[lower, upper]^dim` box of continuous variables named `x0, x1, ...`.
    pub fn continuous_box(dim: usize, lower: f64, upper: f64) -> Result<Self> {
        Self::new(
            (0..dim)
                .map(|i| VariableSpec::continuous(format!("x{i}"), lower, upper))
                .collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.variables.len()
    }

    pub fn variables(&self) -> &[VariableSpec] {
        &self.variables
    }

    pub fn variable(&self, i: usize) -> &VariableSpec {
        &self.variables[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v.name == name)
    }

    pub fn has_categorical(&self) -> bool {
        self.variables.iter().any(VariableSpec::is_categorical)
    }

    pub fn has_conditions(&self) -> bool {
        self.variables.iter().any(|v| v.condition.is_some())
    }

    /// Variable indices ordered so that every parent precedes its children.
    pub fn evaluation_order(&self) -> &[usize] {
        &self.order
    }

    /// Activity of every variable for one decision vector.
    ///
    /// Parents are resolved before children; a variable whose parent is
    /// inactive is inactive too. Missing parent cells count as inactive.
    pub fn activity(&self, row: &[Cell]) -> Vec<bool> {
        let mut active = vec![true; self.dim()];
        for &i in &self.order {
            let Some(cond) = &self.variables[i].condition else { continue };
            let p = self.index_of(&cond.parent).expect("validated parent");
            active[i] = active[p]
                && cond.values.iter().any(|value| match (value, &row[p]) {
                    (ConditionValue::Integer(k), Cell::Int(v)) => k == v,
                    (ConditionValue::Label(l), Cell::Cat(c)) => self.variables[p]
                        .categories()
                        .is_some_and(|cats| cats.get(*c) == Some(l)),
                    _ => false,
                });
        }
        active
    }

    /// Checks box constraints and category membership of a single cell.
    pub fn check_cell(&self, var: usize, cell: &Cell) -> core::result::Result<(), String> {
        let v = &self.variables[var];
        match (&v.domain, cell) {
            (_, Cell::Missing) => Ok(()),
            (Domain::Continuous { lower, upper }, Cell::Real(x)) => {
                if x.is_finite() && lower <= x && x <= upper {
                    Ok(())
                } else {
                    Err(format!("`{}` = {x} outside [{lower}, {upper}]", v.name))
                }
            }
            (Domain::Integer { lower, upper }, Cell::Int(k)) => {
                if lower <= k && k <= upper {
                    Ok(())
                } else {
                    Err(format!("`{}` = {k} outside [{lower}, {upper}]", v.name))
                }
            }
            (Domain::Categorical { categories }, Cell::Cat(c)) => {
                if *c < categories.len() {
                    Ok(())
                } else {
                    Err(format!("`{}` category index {c} out of range", v.name))
                }
            }
            (d, _) => Err(format!("`{}`: cell type does not match {}", v.name, d.kind_name())),
        }
    }
}

fn topological_order(vars: &[VariableSpec]) -> Result<Vec<usize>> {
    // 0 = unvisited, 1 = on stack, 2 = done
    fn visit(i: usize, vars: &[VariableSpec], state: &mut [u8], out: &mut Vec<usize>) -> Result<()> {
        match state[i] {
            2 => return Ok(()),
            1 => {
                return Err(Error::InvalidSpace(format!(
                    "condition cycle through `{}`",
                    vars[i].name
                )))
            }
            _ => {}
        }
        state[i] = 1;
        if let Some(cond) = &vars[i].condition {
            let p = vars.iter().position(|w| w.name == cond.parent).expect("checked");
            visit(p, vars, state, out)?;
        }
        state[i] = 2;
        out.push(i);
        Ok(())
    }
    let mut state = vec![0u8; vars.len()];
    let mut out = Vec::with_capacity(vars.len());
    for i in 0..vars.len() {
        visit(i, vars, &mut state, &mut out)?;
    }
    Ok(out)
}

/// One typed cell of a decision vector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    Real(f64),
    Int(i64),
    /// Index into the variable's category list.
    Cat(usize),
    Missing,
}

impl Cell {
    /// Numeric value of continuous and integer cells.
    pub fn as_f64(&self) -> Option<f64> {
        match *self {
            Cell::Real(x) => Some(x),
            Cell::Int(k) => Some(k as f64),
            _ => None,
        }
    }

    pub fn is_missing(&self) -> bool {
        matches!(self, Cell::Missing)
    }
}

/// Positive affine map `y -> scale * y + shift` of the objective space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveTransform {
    scale: f64,
    shift: f64,
}

impl ObjectiveTransform {
    pub const IDENTITY: Self = Self {
        scale: 1.0,
        shift: 0.0,
    };

    pub fn new(scale: f64, shift: f64) -> Result<Self> {
        if !(scale.is_finite() && scale > 0.0) || !shift.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "transform needs finite scale > 0 and finite shift, got ({scale}, {shift})"
            )));
        }
        Ok(Self { scale, shift })
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn shift(&self) -> f64 {
        self.shift
    }

    #[inline]
    pub fn apply(&self, y: f64) -> f64 {
        self.scale * y + self.shift
    }
}

/// Elementwise `a * y + b`.
pub fn apply_transform(t: &ObjectiveTransform, y: &[f64]) -> Vec<f64> {
    y.iter().map(|&v| t.apply(v)).collect()
}

/// Built-in test functions, all defined on `[-5, 5]^D`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BuiltinFunction {
    Sphere,
    Ellipsoid,
    Rastrigin,
    Rosenbrock,
    LinearSlope,
}

impl BuiltinFunction {
    pub const ALL: [BuiltinFunction; 5] = [
        BuiltinFunction::Sphere,
        BuiltinFunction::Ellipsoid,
        BuiltinFunction::Rastrigin,
        BuiltinFunction::Rosenbrock,
        BuiltinFunction::LinearSlope,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            BuiltinFunction::Sphere => "sphere",
            BuiltinFunction::Ellipsoid => "ellipsoid",
            BuiltinFunction::Rastrigin => "rastrigin",
            BuiltinFunction::Rosenbrock => "rosenbrock",
            BuiltinFunction::LinearSlope => "linear_slope",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        Self::ALL
            .iter()
            .copied()
            .find(|f| f.name() == name)
            .ok_or_else(|| Error::UnknownFunction(name.to_string()))
    }

    fn code(&self) -> u64 {
        *self as u64 + 1
    }

    /// Raw function value at `z = x - shift`; every function except the
    /// slope has its minimum 0 at `z = 0`.
    fn raw(&self, z: &[f64]) -> f64 {
        let d = z.len();
        match self {
            BuiltinFunction::Sphere => z.iter().map(|v| v * v).sum(),
            BuiltinFunction::Ellipsoid => z
                .iter()
                .enumerate()
                .map(|(i, v)| {
                    let e = if d > 1 { 6.0 * i as f64 / (d - 1) as f64 } else { 0.0 };
                    pow(10.0, e) * v * v
                })
                .sum(),
            BuiltinFunction::Rastrigin => z
                .iter()
                .map(|v| v * v - 10.0 * cos(2.0 * core::f64::consts::PI * v) + 10.0)
                .sum(),
            BuiltinFunction::Rosenbrock => {
                // w = z + 1 puts the classic optimum (1, ..., 1) at z = 0
                if d == 1 {
                    return z[0] * z[0];
                }
                (0..d - 1)
                    .map(|i| {
                        let (wi, wn) = (z[i] + 1.0, z[i + 1] + 1.0);
                        100.0 * (wn - wi * wi) * (wn - wi * wi) + (wi - 1.0) * (wi - 1.0)
                    })
                    .sum()
            }
            BuiltinFunction::LinearSlope => z.iter().sum(),
        }
    }
}

impl fmt::Display for BuiltinFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Seeded shift and objective transform of one built-in instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BuiltinInstance {
    pub function: BuiltinFunction,
    pub input_shift: Vec<f64>,
    pub transform: ObjectiveTransform,
}

impl BuiltinInstance {
    /// Instance parameters for `(function, iid)`.
    ///
    /// The stream is ChaCha8 seeded with `seed_from_u64((code << 32) ^ iid)`
    /// where `code` is 1..=5 in declaration order of [`BuiltinFunction`].
    /// Draw order: `dim` shift coordinates uniform in `[-4, 4]`, then the
    /// scale `10^u` with `u` uniform in `[-1, 1]`, then the offset uniform in
    /// `[-1000, 1000]`. `iid = 0` is the untransformed function.
    pub fn new(function: BuiltinFunction, iid: u64, dim: usize) -> Self {
        if iid == 0 {
            return Self {
                function,
                input_shift: vec![0.0; dim],
                transform: ObjectiveTransform::IDENTITY,
            };
        }
        let mut rng = ChaCha8Rng::seed_from_u64((function.code() << 32) ^ iid);
        let input_shift = (0..dim).map(|_| -4.0 + 8.0 * rng.random::<f64>()).collect();
        let scale = pow(10.0, -1.0 + 2.0 * rng.random::<f64>());
        let shift = -1000.0 + 2000.0 * rng.random::<f64>();
        Self {
            function,
            input_shift,
            transform: ObjectiveTransform { scale, shift },
        }
    }

    pub fn evaluate(&self, x: &[f64]) -> f64 {
        let z: Vec<f64> = x.iter().zip(&self.input_shift).map(|(a, s)| a - s).collect();
        self.transform.apply(self.function.raw(&z))
    }

    /// Minimizer within `[-5, 5]^D`.
    pub fn optimum_location(&self) -> Vec<f64> {
        match self.function {
            BuiltinFunction::LinearSlope => vec![-5.0; self.input_shift.len()],
            _ => self.input_shift.clone(),
        }
    }

    pub fn optimum_value(&self) -> f64 {
        self.evaluate(&self.optimum_location())
    }
}

pub type ObjectiveFn = Arc<dyn Fn(&[Cell]) -> f64 + Send + Sync>;

/// A problem instance: search space plus objective.
#[derive(Clone)]
pub struct Problem {
    pub fid: String,
    pub iid: u64,
    pub space: Arc<SearchSpace>,
    objective: ObjectiveFn,
    pub known_optimum: Option<f64>,
    instance: Option<Arc<BuiltinInstance>>,
}

impl fmt::Debug for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Problem")
            .field("fid", &self.fid)
            .field("iid", &self.iid)
            .field("dim", &self.space.dim())
            .field("known_optimum", &self.known_optimum)
            .finish_non_exhaustive()
    }
}

impl Problem {
    pub fn new(
        fid: impl Into<String>,
        iid: u64,
        space: Arc<SearchSpace>,
        objective: ObjectiveFn,
        known_optimum: Option<f64>,
    ) -> Self {
        Self {
            fid: fid.into(),
            iid,
            space,
            objective,
            known_optimum,
            instance: None,
        }
    }

    pub fn evaluate(&self, x: &[Cell]) -> f64 {
        (self.objective)(x)
    }

    /// Convenience for purely numeric spaces.
    pub fn evaluate_real(&self, x: &[f64]) -> f64 {
        let cells: Vec<Cell> = x.iter().map(|&v| Cell::Real(v)).collect();
        self.evaluate(&cells)
    }

    /// Seeded parameters when this is a built-in instance.
    pub fn instance(&self) -> Option<&BuiltinInstance> {
        self.instance.as_deref()
    }

    /// Same problem with `t` applied on top of the objective.
    pub fn with_transform(&self, t: ObjectiveTransform) -> Problem {
        let inner = self.objective.clone();
        Problem {
            fid: self.fid.clone(),
            iid: self.iid,
            space: self.space.clone(),
            objective: Arc::new(move |x| t.apply(inner(x))),
            known_optimum: self.known_optimum.map(|v| t.apply(v)),
            instance: None,
        }
    }
}

/// Built-in instance `(function, iid)` over `[-5, 5]^dim`.
pub fn builtin_problem(function: BuiltinFunction, iid: u64, dim: usize) -> Result<Problem> {
    if dim == 0 {
        return Err(Error::InvalidArgument("dimension must be positive".into()));
    }
    let space = Arc::new(SearchSpace::continuous_box(dim, -5.0, 5.0)?);
    let instance = Arc::new(BuiltinInstance::new(function, iid, dim));
    let inst = instance.clone();
    let objective: ObjectiveFn = Arc::new(move |x: &[Cell]| {
        let v: Vec<f64> = x.iter().map(|c| c.as_f64().unwrap_or(f64::NAN)).collect();
        inst.evaluate(&v)
    });
    Ok(Problem {
        fid: function.name().to_string(),
        iid,
        space,
        objective,
        known_optimum: Some(instance.optimum_value()),
        instance: Some(instance),
    })
}
