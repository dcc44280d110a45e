//! Error type shared by every module in the crate.
//!
//! The variants deliberately mirror the three failure families a caller can
//! react to: bad configuration (caller-supplied parameters), bad data (file
//! contents, degenerate sample sets), and numeric failure (solver breakdown,
//! dimension mismatches). The CLI maps these onto distinct exit codes.

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A caller-supplied parameter violates its contract (bad basis selector,
    /// non-finite ridge weight, zero-sized grid, ...).
    #[error("invalid configuration: {0}")]
    Config(String),

    /// The input data cannot be used (schema mismatch, non-monotonic
    /// timestamps, coincident positions, empty overlap, ...).
    #[error("data error: {0}")]
    Data(String),

    /// A numeric operation failed (rank deficiency, non-finite intermediate,
    /// coefficient/basis dimension mismatch).
    #[error("numeric failure: {0}")]
    Numeric(String),

    /// A model file was written by an incompatible format revision.
    #[error("unsupported model format version {found} (this build reads version {expected})")]
    Version { found: u32, expected: u32 },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
    pub(crate) fn data(msg: impl Into<String>) -> Self {
        Error::Data(msg.into())
    }
    pub(crate) fn numeric(msg: impl Into<String>) -> Self {
        Error::Numeric(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
