use thiserror::Error;

use crate::linalg::SolveDiagnostics;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("kernel columns are linearly dependent (column {column} lost its M-norm)")]
    RankDeficientKernel { column: usize },

    #[error("kernel column {column} is not in the kernel of A: |A z|_inf = {residual:e}")]
    NotInKernel { column: usize, residual: f64 },

    #[error("matrix is not symmetric: {0}")]
    NotSymmetric(&'static str),

    #[error("mass matrix is not positive definite (row {row} has diagonal {diagonal:e})")]
    NotPositiveDefinite { row: usize, diagonal: f64 },

    #[error("inconsistent load: component {component} of Z^T F is {value:e} (tolerance {tolerance:e})")]
    InconsistentLoad {
        component: usize,
        value: f64,
        tolerance: f64,
    },

    #[error("singular system: pivot {pivot:e} at step {step}")]
    SingularSystem { step: usize, pivot: f64 },

    #[error("dense system of size {size} exceeds the dense cutoff {cutoff}")]
    TooLargeForDense { size: usize, cutoff: usize },

    #[error("{solver} did not converge: {} iterations, relative residual {:e}", .diagnostics.iterations, .diagnostics.relative_residual)]
    NotConverged {
        solver: &'static str,
        diagnostics: SolveDiagnostics,
    },

    #[error("{formulation} solve failed: {source}")]
    Formulation {
        formulation: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("rate fit: {0}")]
    Fit(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("malformed problem file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}

pub(crate) fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
