use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The request is valid but beyond what the implementation certifies.
    #[error("capability error: {0}")]
    Capability(String),

    /// A numerical oracle could not reach the requested accuracy.
    #[error("accuracy error: {0}")]
    Accuracy(String),

    #[error("no vibrational mode labelled `{0}`")]
    MissingMode(String),

    #[error("unknown reference record `{0}`")]
    UnknownRecord(String),

    #[error("degenerate: {0}")]
    Degenerate(String),

    #[error("infeasible kinetics: {0}")]
    Infeasible(String),

    #[error("fit failed: {0}")]
    Fit(#[from] FitError),

    #[error("{0}")]
    Config(#[from] ConfigError),

    #[error("histogram file: {0}")]
    Histogram(String),
}

/// Why a lifetime fit was rejected.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum FitError {
    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("no convergence after {} iterations (last relative step {:.3e})", trace.len(), trace.last().map_or(f64::NAN, |t| t.relative_step))]
    NotConverged { trace: Vec<IterationRecord> },

    #[error("lifetime not identifiable: {0}")]
    Unidentifiable(String),
}

/// One damped Gauss-Newton step, kept for diagnosing failed fits.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    pub iteration: usize,
    pub amplitude: f64,
    pub lifetime: f64,
    pub background: f64,
    pub deviance: f64,
    pub damping: f64,
    pub relative_step: f64,
}

/// Config document problems. Syntax errors carry the position reported by
/// the JSON parser; semantic errors carry a key path such as
/// `modes[1].hbar_omega_g_mev`.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid `{path}`{}: {message}", line.map(|l| format!(" (line {l})")).unwrap_or_default())]
    Semantic {
        path: String,
        line: Option<usize>,
        message: String,
    },
}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
