use std::io;

use thiserror::Error;

/// Errors raised by the arithmetic, fitting and reporting layers.
#[derive(Debug, Error)]
pub enum Error {
    /// An input or derived value exceeds the configured arithmetic bound.
    #[error("value {value} exceeds the arithmetic bound {bound}")]
    Capacity { value: u128, bound: u64 },

    /// A caller broke an operation's precondition.
    #[error("contract violation: {0}")]
    Contract(String),

    /// An exact intermediate did not fit in the working width.
    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error("allowlist line {line}: {msg}")]
    Allowlist { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn contract(msg: impl Into<String>) -> Error {
    Error::Contract(msg.into())
}
