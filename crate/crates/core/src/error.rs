use alloc::string::String;

use crate::membership::Condition;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid arguments: {0}")]
    InvalidArguments(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("generator matrix has rank {found}, expected {expected}")]
    RankDeficient { expected: usize, found: usize },

    #[error("precondition violated: condition ({0}) fails")]
    PreconditionViolation(Condition),

    #[error("mode mismatch: {0}")]
    ModeMismatch(&'static str),

    #[error("matrix of order {0} exceeds the minor enumeration limit of 8")]
    SizeLimit(usize),

    #[error("power iteration did not converge within {0} iterations")]
    ConvergenceFailure(usize),

    #[error("boundary contact at step {step}: margin {margin:e} is below the tolerance")]
    BoundaryContact { step: usize, margin: f64 },

    #[error("sample generation failed after {0} attempts")]
    GenerationFailure(usize),

    #[error("hypothesis not met: {0}")]
    HypothesisNotMet(String),

    /// A check that is a theorem failed. Always a bug or a numerical breakdown.
    #[error("internal error: {0}")]
    Internal(String),
}
