use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("input contains non-finite entries")]
    NonFinite,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("point is outside the domain")]
    NotInDomain,
    #[error("polyhedron is empty")]
    EmptyPolyhedron,
    #[error("polyhedron is not a cone")]
    NotACone,
    #[error("group of order {order} exceeds the enumeration cap {cap}")]
    EnumerationCap { order: String, cap: u64 },
    #[error("LP pivot budget of {0} exhausted")]
    PivotBudget(usize),
    #[error("stratification budget of {0} faces exceeded")]
    StrataBudget(usize),
    #[error("projection is not unique ({count} distinct minimizers)")]
    AmbiguousProjection { count: usize },
    #[error("negative singular value {0}")]
    NegativeSingular(f64),
    #[error("subgradient is not in the subdifferential")]
    NotASubgradient,
    #[error("inconclusive: {0}")]
    Inconclusive(String),
}

impl Error {
    /// Resource exhaustion as opposed to malformed input.
    pub fn is_budget(&self) -> bool {
        matches!(
            self,
            Error::PivotBudget(_) | Error::StrataBudget(_) | Error::EnumerationCap { .. }
        )
    }
}
