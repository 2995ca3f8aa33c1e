use thiserror::Error;

/// Failure modes shared across the toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("integral diverged on [0, {upper}] after {panels} mesh panels")]
    DivergedIntegral { upper: f64, panels: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("delta-2 hypothesis 2*phi(x) <= phi(k0*x) fails at x = {x}: {lhs} > {rhs}")]
    NotDelta2 { x: f64, lhs: f64, rhs: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("operation needs a divisible (non-atomic) space, got atoms")]
    IndivisibleAtoms,

    #[error("requested {requested} disjoint pieces but only {available} are available")]
    Capacity { requested: usize, available: usize },

    #[error("no convergence: {0}")]
    NonConvergence(String),

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
