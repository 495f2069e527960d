use thiserror::Error;

/// Error type shared by every module in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("eigensolver missed the residual target after {sweeps} sweeps (off-diagonal norm {off_norm:.3e})")]
    NonConvergence { sweeps: usize, off_norm: f64 },

    #[error("matrix entry ({row}, {col}) is not finite")]
    NonFiniteEntry { row: usize, col: usize },

    #[error("spectral function undefined at retained eigenvalue {eigenvalue}")]
    DomainError { eigenvalue: f64 },

    #[error("not an effect: eigenvalue {eigenvalue} lies outside [0, 1]")]
    NotAnEffect { eigenvalue: f64 },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("effect is not invertible: smallest eigenvalue {min_eigenvalue:.3e}")]
    NotInvertible { min_eigenvalue: f64 },

    #[error("singular linear system: {detail}")]
    SingularSystem { detail: String },

    #[error("zero-valued samples are inconsistent with the positive samples: {detail}")]
    InconsistentKernel { detail: String },

    #[error("no separating ray found within the search budget ({budget} rays examined)")]
    SearchExhausted { budget: usize },

    #[error("invalid tolerances: {detail}")]
    InvalidTolerance { detail: String },

    #[error("a zero vector does not define a ray")]
    ZeroVector,

    #[error("invalid sample: {detail}")]
    InvalidSample { detail: String },

    #[error("parse error: {detail}")]
    Parse { detail: String },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
