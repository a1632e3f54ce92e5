use thiserror::Error;

/// Errors raised by the analytic and simulation layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum LcrError {
    /// An argument lies outside the documented domain.
    #[error("domain error: {0}")]
    Domain(String),
    /// The requested quantity is infinite (e.g. K(1)).
    #[error("divergence: {0}")]
    Divergence(String),
    /// An iteration or quadrature failed to reach its tolerance, or an
    /// intermediate became non-finite.
    #[error("numeric failure: {0}")]
    Numeric(String),
    /// The input is valid but the requested formula does not cover it.
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, LcrError>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(LcrError::Domain(msg.into()))
}

pub(crate) fn numeric<T>(msg: impl Into<String>) -> Result<T> {
    Err(LcrError::Numeric(msg.into()))
}
