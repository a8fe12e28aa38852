use thiserror::Error;

/// Errors produced while building tables, inducing rules, or evaluating them.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("value {value:?} is outside the domain of attribute {attribute}")]
    OutOfDomain { attribute: String, value: String },

    #[error("missing value for attribute {attribute}")]
    MissingValue { attribute: String },

    #[error("line {line}, column {column}: {cause}")]
    Parse {
        line: usize,
        column: usize,
        cause: String,
    },

    #[error("dataset contains no objects")]
    EmptyTable,

    #[error("invalid schema: {0}")]
    InvalidSchema(String),

    #[error("schema mismatch: {0}")]
    SchemaMismatch(String),

    #[error("unknown object id {0}")]
    UnknownId(usize),

    #[error("unknown class {0:?}")]
    UnknownClass(String),

    #[error("target region is empty")]
    EmptyTarget,

    #[error("objects {0:?} cannot be covered without leaving the target region")]
    Uncoverable(Vec<usize>),

    #[error("condition set covers no object")]
    DivisionUndefined,

    #[error("{predictions} predictions but {labels} truth labels")]
    LengthMismatch { predictions: usize, labels: usize },

    #[error("{0} is undefined (zero denominator)")]
    UndefinedMetric(&'static str),

    #[error("invalid rule file: {0}")]
    RuleFile(String),
}

pub type Result<T> = std::result::Result<T, Error>;
