use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("matrix is singular to working precision (pivot {pivot} in column {column})")]
    SingularPivot { column: usize, pivot: f64 },

    #[error("circulant is singular: eigenvalue at Fourier index {index} has modulus {modulus:e}")]
    SingularCirculant { index: usize, modulus: f64 },

    #[error("instance of dimension {n} exceeds the small-instance cap {cap}")]
    CapExceeded { n: usize, cap: usize },

    #[error("eigenvalue iteration did not converge")]
    EigenFailure,

    #[error("stencil offset {offset} collides with another offset modulo {n}")]
    StencilCollision { offset: i64, n: usize },

    #[error("degenerate extrapolation: lambda_min + lambda_max = 0")]
    DegenerateOmega,

    #[error("zero diagonal entry in row {0}")]
    ZeroDiagonal(usize),

    #[error("Matrix Market parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
