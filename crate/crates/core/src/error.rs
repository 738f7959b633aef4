use alloc::string::String;

/// Errors raised by the constructions and deciders.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// Operand shapes do not fit together.
    #[error("shape error: {0}")]
    Shape(String),
    /// An argument lies outside the operation's domain.
    #[error("domain error: {0}")]
    Domain(String),
    /// A numerical precondition (idempotency, duality, ...) failed.
    #[error("precondition failed: {what} (residual {residual:.3e})")]
    Precondition { what: String, residual: f64 },
    /// The requested diagonal cannot be realized.
    #[error("infeasible: {0}")]
    Infeasible(String),
    /// A model is missing information the decider needs.
    #[error("specification error: {0}")]
    Specification(String),
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn shape(msg: impl Into<String>) -> Error {
    Error::Shape(msg.into())
}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
