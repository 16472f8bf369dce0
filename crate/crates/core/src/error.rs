//! Error type shared by all laboratory components.

use thiserror::Error;

/// Errors produced by grid construction, field algebra, solvers and the
/// recovery pipeline.
#[derive(Debug, Error)]
pub enum Error {
    /// A grid constructor was called with inconsistent parameters.
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    /// Two arguments live on different grids but the operation needs one grid.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// A field violates a structural requirement of the operation
    /// (support, symmetry, compatibility at t = 0, ...).
    #[error("field constraint violated: {0}")]
    FieldConstraint(String),

    /// A probe parameter set violates an admissibility requirement.
    #[error("invalid probe: {0}")]
    InvalidProbe(String),

    /// The iterative linear solver stalled before reaching its tolerance.
    #[error(
        "linear solver failed after {iterations} iterations: \
         relative residual {residual:.3e} exceeds tolerance {tolerance:.1e}"
    )]
    SolverFailure {
        /// Iterations performed before giving up.
        iterations: usize,
        /// Relative residual at the final iterate.
        residual: f64,
        /// Requested relative residual.
        tolerance: f64,
    },

    /// A requested boundary-measurement record is absent from a dataset.
    #[error("measurement record not found: {0}")]
    RecordNotFound(String),

    /// A recovery stage could not produce a usable value.
    #[error("recovery failed: {0}")]
    Recovery(String),

    /// The configured work budget ran out before the pipeline finished.
    #[error("budget exhausted during stage {stage}: {detail}")]
    BudgetExhausted {
        /// Pipeline stage that hit the limit.
        stage: String,
        /// What was left undone.
        detail: String,
    },

    /// Underlying I/O failure while writing or reading artifacts.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// Artifact (de)serialization failure.
    #[error("serialization error: {0}")]
    Serialization(String),
}

/// Convenience alias used across the crate.
pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Serialization(e.to_string())
    }
}
