//! Error type shared across the crate.

use std::fmt;

/// Errors produced by polynomial arithmetic, moment propagation, the SDP
/// solver and the risk-bound pipeline.
#[derive(Debug)]
pub enum Error {
    /// Two polynomials with different variable counts were combined.
    VarCountMismatch { left: usize, right: usize },
    /// A polynomial operation would exceed the configured degree cap.
    DegreeCapExceeded { cap: usize, needed: usize },
    /// An intermediate polynomial would exceed the configured term budget.
    TermBudgetExceeded { estimated: usize, cap: usize },
    /// A marginal distribution descriptor failed validation.
    InvalidMarginal(String),
    /// An explicit moment table is too short for the requested order.
    InsufficientMoments { available: usize, needed: usize },
    /// Rescaling detected a constraint that no point can satisfy.
    EmptyUnsafeSet,
    /// Chebyshev-basis moments are only trustworthy up to `valid_degree`.
    MomentInstability { valid_degree: usize, requested: usize },
    /// The SDP solver stopped without an optimal certificate.
    SolverFailure { status: String, detail: String },
    /// A certificate required by the online step is not in the cache.
    MissingCertificate { key: String },
    /// A problem description failed validation.
    InvalidProblem(String),
    /// Failure in a named pipeline stage, wrapping the underlying error.
    Stage { stage: &'static str, source: Box<Error> },
    Io(std::io::Error),
    Json(serde_json::Error),
}

impl Error {
    /// Wrap an error with the pipeline stage it occurred in.
    pub fn in_stage(self, stage: &'static str) -> Self {
        Error::Stage { stage, source: Box::new(self) }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::VarCountMismatch { left, right } => {
                write!(f, "variable count mismatch: {left} vs {right}")
            }
            Error::DegreeCapExceeded { cap, needed } => {
                write!(f, "degree cap exceeded: need {needed}, cap {cap}")
            }
            Error::TermBudgetExceeded { estimated, cap } => {
                write!(f, "term budget exceeded: estimated {estimated} terms, cap {cap}")
            }
            Error::InvalidMarginal(msg) => write!(f, "invalid marginal: {msg}"),
            Error::InsufficientMoments { available, needed } => {
                write!(f, "insufficient moments: have orders 0..={available}, need {needed}")
            }
            Error::EmptyUnsafeSet => write!(f, "empty unsafe set"),
            Error::MomentInstability { valid_degree, requested } => {
                write!(f, "moments unstable beyond degree {valid_degree} (requested {requested})")
            }
            Error::SolverFailure { status, detail } => {
                write!(f, "solver failure ({status}): {detail}")
            }
            Error::MissingCertificate { key } => write!(f, "missing certificate {key}"),
            Error::InvalidProblem(msg) => write!(f, "invalid problem: {msg}"),
            Error::Stage { stage, source } => write!(f, "{stage}: {source}"),
            Error::Io(e) => write!(f, "io error: {e}"),
            Error::Json(e) => write!(f, "json error: {e}"),
        }
    }
}

impl std::error::Error for Error {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            Error::Stage { source, .. } => Some(source),
            Error::Io(e) => Some(e),
            Error::Json(e) => Some(e),
            _ => None,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e)
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e)
    }
}

pub type Result<T> = std::result::Result<T, Error>;
