use thiserror::Error;

/// Failures that end a run before its assertions are evaluated.
#[derive(Debug, Error)]
pub enum CliError {
    /// Invalid or unreadable configuration, or an unusable output location.
    #[error("configuration error: {0}")]
    Config(String),
    /// A core computation rejected its inputs.
    #[error(transparent)]
    Core(#[from] vilenkin_core::Error),
    #[error("cannot write {path}: {message}")]
    Output { path: String, message: String },
}

/// Process exit codes.
pub mod exit {
    pub const PASS: u8 = 0;
    pub const ASSERTION: u8 = 1;
    pub const CONFIG: u8 = 2;
}
