use thiserror::Error;

/// Errors raised by the laboratory's numerical and combinatorial routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },

    #[error("degenerate simplex {simplex:?}: {reason}")]
    DegenerateSimplex { simplex: Vec<usize>, reason: String },

    #[error("not a subcomplex: simplex {simplex:?} has a face outside the set")]
    NotSubcomplex { simplex: Vec<usize> },

    #[error("non-multiconical link at simplex {simplex:?}: {reason}")]
    NonMulticonical { simplex: Vec<usize>, reason: String },

    #[error("codimension-zero stratum is not orientable (conflict at simplex {simplex:?})")]
    NonOrientable { simplex: Vec<usize> },

    #[error("root bracketing failed near lambda = {lambda}: {reason}")]
    RootBracketing { lambda: f64, reason: String },

    #[error("no spectral gap at tolerance {gap_tol}: straddling eigenvalues {below} and {above}")]
    NoSpectralGap { gap_tol: f64, below: f64, above: f64 },

    #[error("ambiguous numerical rank: singular values {below} and {above} straddle cutoff {cutoff}")]
    AmbiguousRank { cutoff: f64, below: f64, above: f64 },

    #[error("requested {requested} eigenvalues but the space has dimension {available}")]
    CountExceedsDimension { requested: usize, available: usize },

    #[error("eigensolver did not converge after {iterations} iterations (worst residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("mass matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("subspace collapses under projection off the kernel (relative Gram eigenvalue {ratio:e})")]
    SubspaceCollapse { ratio: f64 },

    #[error("Bessel function out of supported range: order {order}, argument {argument}")]
    BesselRange { order: f64, argument: f64 },

    #[error("problem of dimension {dimension} exceeds the dense limit {limit} for this operation")]
    TooLarge { dimension: usize, limit: usize },

    #[error("degree mismatch: {0}")]
    DegreeMismatch(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
