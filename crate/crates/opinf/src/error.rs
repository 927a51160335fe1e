//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid degree {0}: must be even and at least 2")]
    InvalidDegree(usize),

    #[error("invalid dimension: need at least one variable")]
    InvalidDimension,

    #[error("exponent {0} exceeds the supported maximum of {max}", max = crate::monomials::MAX_EXPONENT)]
    ExponentOverflow(u32),

    #[error("invalid cluster: {0}")]
    InvalidCluster(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("degenerate spectrum: singular values are all zero")]
    DegenerateSpectrum,

    #[error("rank {requested} out of range 1..={max}")]
    RankOutOfRange { requested: usize, max: usize },

    #[error("non-finite values in {0}")]
    NonFinite(String),

    #[error("invalid snapshot set: {0}")]
    InvalidSnapshots(String),

    #[error("invalid conic problem: {0}")]
    InvalidProblem(String),

    #[error("inference failed: solver status {0}")]
    InferenceFailed(String),

    #[error("certificate invalid: {0}")]
    CertificateInvalid(String),

    #[error("singular mass matrix")]
    SingularMass,

    #[error("simulation diverged at step {last_valid}")]
    Diverged { last_valid: usize },

    #[error("full-order model diverged at step {0}")]
    FomDiverged(usize),

    #[error("undefined metric: {0}")]
    UndefinedMetric(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("model file: {0}")]
    ModelFormat(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
