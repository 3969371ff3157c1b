use std::fmt;

/// Errors shared by every structure in the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("shape error: {0}")]
    Shape(String),

    #[error("range error: {0}")]
    Range(String),

    #[error("duplicate values in input row; normalize the grid first")]
    DuplicateValues,

    #[error("unsupported k={k}: {reason}")]
    UnsupportedK { k: usize, reason: &'static str },

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("query not supported by encoding variant {variant}: {reason}")]
    VariantMismatch { variant: &'static str, reason: String },

    #[error("select out of range: symbol {symbol} has no occurrence {ordinal}")]
    SelectNotFound { symbol: u8, ordinal: usize },

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("traversal deadlock: {0}")]
    TraversalDeadlock(String),

    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn range(msg: impl fmt::Display) -> Self {
        Error::Range(msg.to_string())
    }

    pub(crate) fn shape(msg: impl fmt::Display) -> Self {
        Error::Shape(msg.to_string())
    }

    pub(crate) fn format(msg: impl fmt::Display) -> Self {
        Error::Format(msg.to_string())
    }
}
