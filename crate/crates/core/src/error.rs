use thiserror::Error;

use crate::lp::LpError;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// The market, prior set or claim is structurally invalid, or the
    /// requested analysis is vacuous (e.g. every leaf is polar).
    #[error("model error: {0}")]
    Model(String),

    /// A JSON document does not match its schema. `pointer` is an RFC 6901
    /// JSON pointer to the offending field.
    #[error("schema error at {pointer}: {message}")]
    Schema { pointer: String, message: String },

    /// The operation requires a condition (usually no-arbitrage) that the
    /// market does not satisfy.
    #[error("precondition failed: {0}")]
    Precondition(String),

    /// Instance larger than the brute-force oracles accept.
    #[error("scale exceeded: {0}")]
    Scale(String),

    /// The two independent sub-oracles disagreed.
    #[error("oracle disagreement: {0}")]
    OracleDisagreement(String),

    #[error(transparent)]
    Lp(#[from] LpError),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn model(msg: impl Into<String>) -> Self {
        Error::Model(msg.into())
    }

    pub fn schema(pointer: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Schema {
            pointer: pointer.into(),
            message: message.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
