use thiserror::Error;

/// Errors produced by the estimators, oracles and instance generators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("elements and weights differ in length ({elements} vs {weights})")]
    WeightCountMismatch { elements: usize, weights: usize },

    #[error("item {position} has zero weight; stream items must weigh at least 1")]
    ZeroWeight { position: usize },

    #[error("total weight overflows a 64-bit integer")]
    WeightOverflow,

    #[error("index {index} is out of range for a sequence of length {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("indices do not form a chain (break between positions {from} and {to})")]
    NotAChain { from: usize, to: usize },

    #[error("length mismatch: x has {x_len} symbols, y has {y_len}")]
    LengthMismatch { x_len: usize, y_len: usize },

    #[error("stream length {actual} does not match the declared length {declared}")]
    DeclaredLengthMismatch { declared: u64, actual: u64 },

    #[error("parameter `{name}` = {value} is out of range: {expected}")]
    InvalidParameter {
        name: &'static str,
        value: String,
        expected: &'static str,
    },

    #[error("brute force is limited to {max} items, got {len}")]
    TooLarge { len: usize, max: usize },

    #[error("sketch has already been finished")]
    AlreadyFinished,

    #[error("stream exceeded its declared bound on {what} ({bound})")]
    BoundExceeded { what: &'static str, bound: u64 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(name: &'static str, value: impl ToString, expected: &'static str) -> Error {
    Error::InvalidParameter {
        name,
        value: value.to_string(),
        expected,
    }
}
