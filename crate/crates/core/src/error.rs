use thiserror::Error;

/// Errors raised by the geometry pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("matrix is not positive definite (pivot {pivot} at row {row})")]
    NotPositiveDefinite { row: usize, pivot: f64 },

    #[error("matrix is not Hermitian (asymmetry {asymmetry:.3e})")]
    NotHermitian { asymmetry: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("complex structure is not integrable: (0,2) residual {residual:.3e}")]
    NotIntegrable { residual: f64 },

    #[error("bracket violates the Jacobi identity: residual {residual:.3e}")]
    JacobiViolation { residual: f64 },

    #[error("frame change is numerically singular (condition number {condition:.3e})")]
    SingularFrame { condition: f64 },

    #[error("unknown catalog entry `{0}`")]
    UnknownCatalogEntry(String),

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, GeometryError>;
