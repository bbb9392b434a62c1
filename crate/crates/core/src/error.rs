use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not a rotation (orthogonality deviation {deviation:.3e}, det {det:.6})")]
    NonOrthogonalInput { deviation: f64, det: f64 },

    #[error("diagonal entry {index} is not strictly positive: {value}")]
    NonPositiveEntry { index: usize, value: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("target lies outside the injectivity domain of the log map (|Log|_F = {norm:.6})")]
    OutsideInjectivityRadius { norm: f64 },

    #[error("dimension p = {p} is outside the supported range 2..=5")]
    DimensionTooLarge { p: usize },

    #[error("unsupported dimension p = {p} for {what}")]
    UnsupportedDimension { p: usize, what: &'static str },

    #[error("matrix is not symmetric (asymmetry {asymmetry:.3e})")]
    NotSymmetric { asymmetry: f64 },

    #[error("matrix is not positive definite (smallest eigenvalue {min_eigenvalue:.3e})")]
    NotPositiveDefinite { min_eigenvalue: f64 },

    #[error("unsupported stratum: {0}")]
    UnsupportedStratum(String),

    #[error("empty input")]
    EmptyInput,

    #[error("bad parameter: {0}")]
    BadParameter(String),
}
