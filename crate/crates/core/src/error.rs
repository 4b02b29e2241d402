use thiserror::Error;

/// Errors raised by the group, permutation, S-ring and isomorphism layers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),

    /// `{e}` is not a basic set.
    #[error("axiom 1 violated: {{e}} is not a class (class containing e: {class:?})")]
    Axiom1Violation { class: Vec<usize> },

    /// The inverse of a class is not a class.
    #[error("axiom 2 violated: inverse of {set:?} is {inverse:?}, which is not a class")]
    Axiom2Violation {
        set: Vec<usize>,
        inverse: Vec<usize>,
    },

    /// The product `XY` does not decompose over the classes with constant coefficients.
    #[error("axiom 3 violated: {x:?}*{y:?} is not constant on {z:?}")]
    Axiom3Violation {
        x: Vec<usize>,
        y: Vec<usize>,
        z: Vec<usize>,
    },

    /// A proved structural property failed on a concrete input.
    #[error("property violation: {0}")]
    PropertyViolation(String),

    #[error("not an A-section: {0}")]
    NotASection(String),

    #[error("section mismatch: {0}")]
    SectionMismatch(String),

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
