use thiserror::Error;

use crate::numerics::LogValue;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid symbol {symbol:?} at index {index}; expected '0' or '1'")]
    Symbol { index: usize, symbol: char },

    #[error("invalid byte 0x{byte:02x} at offset {index}; expected 0x00 or 0x01")]
    Byte { index: usize, byte: u8 },

    #[error("sequence length {0} is too short; the horizon must be at least 2")]
    Length(usize),

    #[error("inconsistent Markov type: {0}")]
    MarkovType(String),

    #[error("lower benchmark is degenerate for a constant sequence")]
    DegenerateType {
        /// Value under the 0^0 = 1 convention.
        convention: LogValue,
    },

    #[error("invalid parameter: {0}")]
    Param(String),

    #[error("transition probabilities are both zero; the chain has no stationary distribution")]
    ReducibleChain,

    #[error("changepoint {tau} out of range 1..={max}")]
    TauRange { tau: usize, max: usize },

    #[error("horizon {n} too small; at least {min} required")]
    HorizonTooSmall { n: usize, min: usize },

    #[error("horizon {n} exceeds the enumeration cap {cap}")]
    HorizonTooLarge { n: usize, cap: usize },

    #[error("significance level {0} outside (0, 1]")]
    AlphaRange(f64),

    #[error("e-power undefined: e-value is zero on a sequence with positive mass")]
    Undefined,

    #[error("malformed Markov graph: {0}")]
    MalformedGraph(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("invariant violated at replication {index}: {detail}")]
    Invariant { index: u64, detail: String },
}

pub type Result<T> = std::result::Result<T, Error>;
