use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("constraint generators are linearly dependent (Gram matrix singular)")]
    DependentConstraints,

    #[error("inertia map is singular at index pair ({i}, {j})")]
    SingularInertia { i: usize, j: usize },

    #[error("multiplier system is singular: constraint/inertia combination is degenerate")]
    SingularMultiplierSystem,

    #[error(
        "potential gradient inconsistent with its value (finite-difference error {error:.3e})"
    )]
    InconsistentGradient { error: f64 },

    #[error("case `{case}` violates its hypotheses: {reason}")]
    CaseViolation { case: String, reason: String },

    #[error("step size underflow at t = {t}")]
    StepUnderflow { t: f64 },

    #[error("maximum number of steps ({max_steps}) exceeded at t = {t}")]
    MaxStepsExceeded { max_steps: usize, t: f64 },

    #[error("non-finite state encountered at t = {t}")]
    NonFinite { t: f64 },

    #[error("reparametrization observable changes sign near t = {t}")]
    SignChange { t: f64 },

    #[error("output grid too coarse for phase unwrapping: {0}")]
    CoarseGrid(String),

    #[error("inconsistent initial data: {0}")]
    InconsistentData(String),

    #[error("no asymptotic line: {0}")]
    NoAsymptoticLine(String),

    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}
