//! Error type shared by all modules.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An input that must be finite was NaN or infinite.
    #[error("{0} must be finite")]
    NonFinite(&'static str),
    /// A value left the physical or temporal domain of an operation.
    #[error("{0}")]
    Domain(String),
    /// A caller-side precondition was not met (e.g. a trajectory too short
    /// for the requested estimate).
    #[error("{0}")]
    Precondition(String),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }
}

/// Returns `Err(Error::NonFinite(name))` unless `x` is finite.
pub fn ensure_finite(x: f64, name: &'static str) -> crate::Result<()> {
    if x.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite(name))
    }
}
