use thiserror::Error;

/// Errors raised by constructions and checks across the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("pole at x = {x}: denominator magnitude {magnitude:e} below threshold")]
    PoleAtPoint { x: f64, magnitude: f64 },

    #[error("non-finite value at x = {x}")]
    NonFinite { x: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("singular matrix: pivot magnitude {pivot:e} below threshold")]
    SingularMatrix { pivot: f64 },

    #[error("incomplete Jordan data: {vectors} chain vectors for dimension {n}")]
    IncompleteSpec { vectors: usize, n: usize },

    #[error("invalid Jordan data: {0}")]
    InvalidSpec(String),

    #[error("singular Wronskian: min |W| = {min_abs:e} at x = {x}")]
    SingularWronskian { min_abs: f64, x: f64 },

    #[error("eigenvalues must be distinct")]
    DegenerateEigenvalues,

    #[error("leading coefficient is not a constant nondegenerate matrix")]
    SingularLeading,

    #[error("order mismatch: {0}")]
    OrderMismatch(String),

    #[error("nonzero remainder: max |R| = {residual:e} exceeds {tol:e}")]
    NonzeroRemainder { residual: f64, tol: f64 },

    #[error("kernel membership failed: max |Q f| = {residual:e} exceeds {tol:e}")]
    KernelMembershipFailed { residual: f64, tol: f64 },

    #[error("criterion condition {condition} violated: {detail}")]
    ConditionViolated { condition: u8, detail: String },

    #[error("matrix is not a symmetry of the Hamiltonian: max |[V, A]| = {residual:e}")]
    NotASymmetry { residual: f64 },

    #[error("too few usable grid points: {usable} of {total}")]
    InsufficientGrid { usable: usize, total: usize },

    #[error("parse error at offset {offset}: {message}")]
    Parse { offset: usize, message: String },

    #[error("schema error: {0}")]
    Schema(String),
}

impl Error {
    /// Stable short code used in reports.
    pub fn code(&self) -> String {
        match self {
            Error::PoleAtPoint { .. } => "PoleAtPoint".into(),
            Error::NonFinite { .. } => "NonFinite".into(),
            Error::DimensionMismatch(_) => "DimensionMismatch".into(),
            Error::SingularMatrix { .. } => "SingularMatrix".into(),
            Error::IncompleteSpec { .. } => "IncompleteSpec".into(),
            Error::InvalidSpec(_) => "InvalidSpec".into(),
            Error::SingularWronskian { .. } => "SingularWronskian".into(),
            Error::DegenerateEigenvalues => "DegenerateEigenvalues".into(),
            Error::SingularLeading => "SingularLeading".into(),
            Error::OrderMismatch(_) => "OrderMismatch".into(),
            Error::NonzeroRemainder { .. } => "NonzeroRemainder".into(),
            Error::KernelMembershipFailed { .. } => "KernelMembershipFailed".into(),
            Error::ConditionViolated { condition, .. } => format!("ConditionViolated({condition})"),
            Error::NotASymmetry { .. } => "NotASymmetry".into(),
            Error::InsufficientGrid { .. } => "InsufficientGrid".into(),
            Error::Parse { .. } => "Parse".into(),
            Error::Schema(_) => "SchemaError".into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
