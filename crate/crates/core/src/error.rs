use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("affine system Ax = b is inconsistent (residual {residual:e})")]
    InconsistentAffine { residual: f64 },

    #[error("point has no image shape")]
    ShapeMissing,

    #[error("shape {rows}x{cols} does not match length {len}")]
    ShapeMismatch { rows: usize, cols: usize, len: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("no sign change of phi found within the expansion budget (best e = {best_e:e})")]
    BracketingFailure { best_e: f64 },

    /// The supremum of E over the domain is not positive, i.e. the current
    /// point already minimizes the linear relaxation.
    #[error("subproblem supremum is not positive (best e = {best_e:e})")]
    NoPositiveRoot { best_e: f64 },

    #[error("quadratic for e has negative discriminant {0:e}")]
    NegativeDiscriminant(f64),

    #[error("closed form not available for {0} domains")]
    NoClosedForm(&'static str),

    #[error("KKT residual {residual:e} exceeds tolerance")]
    KktViolation { residual: f64 },

    #[error("objective returned a non-finite value or subgradient")]
    NonFiniteObjective,

    #[error("degenerate reference: f0 = {f0:e} is not above f_hat = {f_hat:e}")]
    DegenerateReference { f0: f64, f_hat: f64 },

    #[error("config error: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
