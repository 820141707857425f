use thiserror::Error;

/// Errors reported by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { name: String, offset: usize },

    #[error("cannot differentiate: {0}")]
    Differentiation(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("grid functions live on different grids")]
    GridMismatch,

    #[error("coefficient vectors belong to different decompositions")]
    DecompositionMismatch,

    #[error("missing derivative data: {0}")]
    MissingDerivative(&'static str),

    #[error("no sign change on [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },

    #[error("non-finite function value at {at}")]
    NonFinite { at: f64 },

    #[error("could not bracket eigenvalue {index} within the scan window [{lo}, {hi}]")]
    Bracket { index: usize, lo: f64, hi: f64 },

    #[error("ODE step failure at z = {at}")]
    StepFailure { at: f64 },

    #[error("eigenvalue iteration did not converge for index {index}")]
    NoConvergence { index: usize },

    #[error("singular tridiagonal system at row {row}")]
    Singular { row: usize },

    #[error("boundary condition violated: residuals ({left}, {right})")]
    BoundaryViolation { left: f64, right: f64 },

    #[error("closed-form and direct evaluations disagree at mode {index}: {closed} vs {direct}")]
    Disagreement { index: usize, closed: f64, direct: f64 },

    #[error("missed root in panel [{lo}, {hi}]")]
    MissedRoot { lo: f64, hi: f64 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
