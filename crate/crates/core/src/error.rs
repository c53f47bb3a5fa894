use thiserror::Error;

/// Errors raised by the numeric layers and the command front end.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("overflow: (2*{index}-1)^2 exceeds the exact integer range of {mode}")]
    Overflow { index: u64, mode: &'static str },

    #[error("requested {requested} digits but only {available} digits of pi are stored")]
    PrecisionUnachievable { requested: u32, available: u32 },

    #[error("enumeration limit exceeded: {tuples} index tuples for M={m}, n={n} (limit {limit})")]
    LimitExceeded { m: u64, n: usize, tuples: u128, limit: u128 },

    #[error("full expansion of {m} factors exceeds the memory guard of {limit}; pass an order cutoff")]
    MemoryGuard { m: u64, limit: u64 },

    #[error("mode mismatch: {0}")]
    Mode(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
