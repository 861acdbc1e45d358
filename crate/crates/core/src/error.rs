use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("expected a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not hermitian: max |A - A*| = {deviation:e} exceeds tolerance {tol:e}")]
    NotHermitian { deviation: f64, tol: f64 },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("rank deficient: detected rank {rank} of {cols} columns")]
    RankDeficient { rank: usize, cols: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("moment matrix breakdown at degree {degree}: pivot {pivot:e}")]
    Conditioning { degree: usize, pivot: f64 },

    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("tensor term count {count} exceeds limit {limit}")]
    TooManyTerms { count: usize, limit: usize },

    #[error("invalid scenario field `{field}`: {msg}")]
    Usage { field: String, msg: String },

    #[error("unknown check `{id}`; available: {}", available.join(", "))]
    UnknownCheck { id: String, available: Vec<String> },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
