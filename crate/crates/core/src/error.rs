use thiserror::Error;

/// Errors raised by the arithmetic kernels and checkers.
#[derive(Debug, Error)]
pub enum Error {
    /// Operands disagree on base point, truncation orders or algebra.
    #[error("operand mismatch: {0}")]
    Mismatch(String),
    /// A derivative or construction needs more truncation order than is left.
    #[error("insufficient truncation order: {0}")]
    Truncation(String),
    /// Division or logarithm at a point where the body vanishes.
    #[error("singular body: {0}")]
    Singular(String),
    /// An even-only operation was applied to an odd or mixed element.
    #[error("parity violation: {0}")]
    Parity(String),
    /// Invalid configuration (generator set, curve spec, ...).
    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
