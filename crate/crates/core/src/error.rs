//! Error type shared by every module.

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Failure modes of the numerical routines.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// Argument outside the mathematical domain of the operation
    /// (negative mean photon number, non-monotone grid, …).
    #[error("domain error: {0}")]
    Domain(String),

    /// Argument inside the domain but outside the range this
    /// implementation supports without overflow or precision loss.
    #[error("range error: {0}")]
    Range(String),

    /// Requested index or size exceeds a hard capacity bound.
    #[error("capacity exceeded: index {index} > max {max}")]
    Capacity { index: usize, max: usize },

    /// The requested quantity has no defined value for these inputs
    /// (e.g. g⁽ℓ⁾ of the vacuum).
    #[error("undefined: {0}")]
    Undefined(String),

    /// A numerical process lost significance or failed to converge.
    #[error("numerics: {0}")]
    Numerics(String),

    /// The ODE integrator could not reach the requested accuracy.
    #[error("integration failure: {0}")]
    Integration(String),

    /// Malformed user input (config files, tabulated data).
    #[error("invalid input: {0}")]
    Invalid(String),
}
