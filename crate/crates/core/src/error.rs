use thiserror::Error;

/// Errors produced by mesh construction, problem setup, assembly and the
/// study runner. Pure index/domain preconditions panic instead; everything
/// reachable from user input goes through this type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),
    #[error("invalid problem data: {0}")]
    InvalidProblem(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("mismatch: {0}")]
    Mismatch(String),
    #[error("quadrature: {0}")]
    Quadrature(String),
    #[error(transparent)]
    Solve(#[from] SolveError),
}

/// Failures of the sparse direct solver.
#[derive(Debug, Error)]
pub enum SolveError {
    #[error("matrix is numerically singular at pivot column {column}")]
    Singular { column: usize },
    #[error("solver did not reach the residual contract: achieved relative residual {achieved:e} > 1e-12")]
    Residual { achieved: f64 },
    #[error("banded factorization would need {bytes} bytes; system too large for the direct solver")]
    TooLarge { bytes: usize },
    #[error("dimension mismatch: matrix is {rows}x{cols}, rhs has length {rhs}")]
    Shape { rows: usize, cols: usize, rhs: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
