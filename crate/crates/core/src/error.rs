use std::path::PathBuf;

/// Errors produced by the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A caller-supplied parameter is outside its admissible range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// An input field violates a documented contract (negative cost,
    /// out-of-range intensity, mismatched dimensions, ...).
    #[error("contract violation: {0}")]
    Contract(String),

    /// The solver produced a NaN or infinity.
    #[error("non-finite value in `{variable}` at iteration {iteration}")]
    NonFinite { variable: String, iteration: usize },

    /// Filesystem-level failure, with the offending path.
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    /// The file exists but its contents cannot be decoded.
    #[error("{path}: {detail}")]
    Format { path: PathBuf, detail: String },
}

pub type Result<T> = std::result::Result<T, Error>;
