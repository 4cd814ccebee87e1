use thiserror::Error;

/// Errors raised by the core toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument violates a structural precondition (digit out of range,
    /// mismatched groups, index beyond the resolution).
    #[error("validation error: {0}")]
    Validation(String),
    /// The group cannot be represented (e.g. `M_N` overflows `usize`).
    #[error("configuration error: {0}")]
    Configuration(String),
    /// A real parameter lies outside the domain where the quantity is defined.
    #[error("domain error: {0}")]
    Domain(String),
    /// The operation was invoked in a way it does not support.
    #[error("usage error: {0}")]
    Usage(String),
    #[error("serialization error: {0}")]
    Serialization(String),
}

pub type Result<T> = std::result::Result<T, Error>;

macro_rules! bail {
    ($kind:ident, $($arg:tt)*) => {
        return Err($crate::error::Error::$kind(format!($($arg)*)))
    };
}

pub(crate) use bail;
