use thiserror::Error;

/// Errors raised by the exact data model and the solvers built on it.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("context error: {0}")]
    Context(String),

    #[error("shift {shift} is not a member of the lattice {lattice}")]
    Lattice { shift: String, lattice: String },

    #[error("not representable: {0}")]
    Representability(String),

    #[error("resource limit exceeded: {0}")]
    Resource(String),

    #[error("shape error: {0}")]
    Shape(String),

    #[error("cannot decide: {0}")]
    Undecidable(String),

    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
