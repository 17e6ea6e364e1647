use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("resource limit: {0}")]
    Resource(String),
    #[error("index out of range: {0}")]
    OutOfRange(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("matrix is not SPD: pivot {pivot} at column {column}")]
    NotSpd { column: usize, pivot: f64 },
    #[error("zero pivot at column {0}")]
    ZeroPivot(usize),
    #[error("singular rank-one deflation: 1 - z^T A^-1 z = {0:e}")]
    SingularDeflation(f64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("mismatched spaces: {0}")]
    Mismatch(String),
    #[error("solver did not converge: {0}")]
    NotConverged(String),
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
