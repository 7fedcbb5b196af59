use thiserror::Error;

/// Errors produced by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("bad dimensions: need d >= 3 and m >= d, got d = {d}, m = {m}")]
    BadDimensions { d: u64, m: u64 },

    #[error("not a probability vector: {0}")]
    NotAProbabilityVector(String),

    #[error("weights are not regular: p_{index} = {weight} exceeds interior weight p_{interior} = {interior_weight}")]
    NotRegular {
        index: usize,
        weight: f64,
        interior: usize,
        interior_weight: f64,
    },

    #[error("atom count {needed} exceeds the memory budget of {budget} atoms")]
    Overflow { needed: u128, budget: u128 },

    #[error("enumeration of {needed} words exceeds the budget of {budget}")]
    Budget { needed: u128, budget: u128 },

    #[error("no barrier digit can exist: m >= 2d - 2")]
    NoBarrier,

    #[error("no barrier atom found up to level {max_level}")]
    BarrierNotFound { max_level: u32 },

    #[error("digit {b} is not a barrier digit of this system")]
    NotABarrier { b: u32 },

    #[error("matrix is not square")]
    NotSquare,

    #[error("matrix has a negative entry at ({row}, {col})")]
    NegativeEntry { row: usize, col: usize },

    #[error("sample count must be at least 1")]
    BadSampleCount,

    #[error("curve is not concave at grid index {index} (excess {excess:e})")]
    NotConcave { index: usize, excess: f64 },

    #[error("unresolved: {0}")]
    Unresolved(String),

    #[error("periodic word consists only of digit 0 or only of digit m")]
    DegenerateWord,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
