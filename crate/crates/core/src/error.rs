use alloc::string::String;

/// Errors raised anywhere in the core crate.
///
/// Everything here is a validation failure on caller-supplied data; the
/// crate has no IO and therefore no transient errors.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid search space: {0}")]
    InvalidSpace(String),
    #[error("unknown function id `{0}`")]
    UnknownFunction(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("strategy `{strategy}` unavailable for dimension {dim}")]
    StrategyUnavailable { strategy: &'static str, dim: usize },
    #[error("non-finite objective value {value} at row {row}")]
    NonFiniteObjective { row: usize, value: f64 },
    #[error("non-finite value in input at position {0}")]
    NonFinite(usize),
    #[error("design row {row}: {message}")]
    InvalidDesign { row: usize, message: String },
    #[error("design is not evaluated")]
    NotEvaluated,
    #[error("design is already evaluated")]
    AlreadyEvaluated,
    #[error("value {value} of `{variable}` outside declared bounds [{lower}, {upper}]")]
    OutOfBounds {
        variable: String,
        value: f64,
        lower: f64,
        upper: f64,
    },
    #[error("unknown label `{label}` for categorical variable `{variable}`")]
    UnknownLabel { variable: String, label: String },
    #[error("target encoding: category `{category}` of `{variable}` has no rows and smoothing is 0")]
    EmptyCategory { variable: String, category: String },
    #[error("categorical variable `{0}` requires an encoding")]
    EncodingRequired(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("performance data: {0}")]
    InvalidPerformance(String),
    #[error("cross-validation: {0}")]
    InvalidFolds(String),
}

pub type Result<T> = core::result::Result<T, Error>;
