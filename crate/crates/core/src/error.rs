use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("probability table not normalized: setting (x={x}, ctx={ctx}) sums to {sum}")]
    Normalization { x: usize, ctx: usize, sum: f64 },

    #[error("parameter out of domain: {0}")]
    Domain(String),

    #[error("incompatible measurements in context ({0}, {1}): commutator norm {2:e}")]
    Incompatible(usize, usize, f64),

    #[error("not a dichotomic observable: {0}")]
    NotDichotomic(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("inequality table: {0}")]
    Table(String),

    #[error("facet enumeration exceeded its budget after {found} facets")]
    BudgetExceeded { found: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
