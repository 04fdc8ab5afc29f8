//! Error type shared by every module.

/// Errors raised by construction and evaluation routines.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A truncated-Fock-space precondition failed: the requested state or
    /// operator does not fit in the retained levels.
    #[error("truncation error: {0}")]
    Truncation(String),

    /// Two values live in spaces of different dimension.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// The requested quantity is undefined for these parameters
    /// (e.g. a mixing angle at zero coupling and zero nonlinearity).
    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    /// A state or amplitude pair that must be normalized is not.
    #[error("unnormalized input: {0}")]
    UnnormalizedInput(String),

    /// Branch index outside {0, 1}.
    #[error("invalid branch index {0}: expected 0 or 1")]
    InvalidBranch(usize),

    /// Model or sweep parameters violate their invariants.
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Finite and strictly positive; rejects NaN.
pub(crate) fn require_positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParams(format!("{name} = {v} must be > 0")))
    }
}

/// Finite and nonnegative; rejects NaN.
pub(crate) fn require_non_negative(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParams(format!("{name} = {v} must be >= 0")))
    }
}
