use thiserror::Error;

#[derive(Debug, Error)]
pub enum EvrepError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("operator is not hermitian: max |A - A\u{2020}| = {residual:.3e}")]
    NotHermitian { residual: f64 },

    #[error("direction scheme is ill-conditioned: condition number {condition_number:.3e}")]
    IllConditionedScheme { condition_number: f64 },

    #[error("state is not positive semidefinite: lambda_min = {lambda_min:.3e}")]
    InvalidState { lambda_min: f64 },

    #[error("degenerate state: trace = {trace:.3e}")]
    DegenerateState { trace: f64 },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("malformed file: {0}")]
    Malformed(String),
}

pub type Result<T> = std::result::Result<T, EvrepError>;
