//! Crate-wide error type.
//!
//! Every fallible operation in the crate returns [`Error`]. The CLI maps
//! error categories onto its exit-code contract (0 pass, 1 audit failure,
//! 2 schema/input error, 3 out-of-regime), see [`Error::exit_code`].

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not Hermitian within tolerance {tol:e}: max deviation {deviation:e}")]
    NotHermitian { deviation: f64, tol: f64 },

    #[error("dimension cap exceeded: {dim} > 2^{max_qubits}")]
    DimensionCap { dim: usize, max_qubits: u32 },

    #[error("invalid Pauli index {0} (must be 0..=3)")]
    InvalidPauliIndex(usize),

    #[error("schema error: {0}")]
    Schema(String),

    #[error("term on {support:?} violates the unit-norm contract: norm {norm} > 1")]
    NormViolation { support: Vec<u32>, norm: f64 },

    #[error("qubit index {index} out of range for n = {n}")]
    IndexOutOfRange { index: u32, n: u32 },

    #[error("out of regime: {0}")]
    Regime(String),

    #[error("degenerate pivot: spectral gap {gap:e} below 1e-12")]
    DegeneratePivot { gap: f64 },

    #[error("gap precondition violated: {0}")]
    GapPrecondition(String),

    #[error("invariant violation: {0}")]
    InvariantViolation(String),

    #[error("promise gap collapses after rounding: {0}")]
    GapCollapse(String),

    #[error("audit failure: {0}")]
    Audit(String),

    #[error("eigensolver did not converge: {0}")]
    NoConvergence(String),

    #[error("non-commuting input: max residual commutator {residual:e} exceeds {tol:e}")]
    NonCommuting { residual: f64, tol: f64 },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// CLI exit code for this error: 2 for schema/input problems, 3 for
    /// out-of-regime inputs, 1 for everything else (audit-level failures).
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Schema(_)
            | Error::Json(_)
            | Error::Io(_)
            | Error::IndexOutOfRange { .. }
            | Error::InvalidPauliIndex(_)
            | Error::DimensionMismatch(_) => 2,
            Error::Regime(_) | Error::NormViolation { .. } | Error::GapCollapse(_) => 3,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
