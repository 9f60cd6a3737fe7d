use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("flat index must be >= 1")]
    ZeroFlatIndex,

    #[error("position {j} out of range for level {n} (1 <= j <= 2^n)")]
    PositionOutOfRange { n: u32, j: u64 },

    #[error("level {0} out of supported range")]
    LevelOutOfRange(u32),

    #[error("{name} = {value} outside [{lo}, {hi}]")]
    OutOfDomain {
        name: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("shape parameter l must be positive, got {0}")]
    InvalidShape(f64),

    #[error("norm exponent p must lie in [1, 64], got {0}")]
    InvalidExponent(f64),

    #[error("operation requires p > {min}, got {p}")]
    ExponentTooSmall { p: f64, min: f64 },

    #[error("duplicate index {0} in combination")]
    DuplicateIndex(u64),

    #[error("combination has no terms")]
    EmptyCombination,

    #[error("level profile has count {count} at level {n}, exceeding capacity 2^{n}")]
    ProfileOverCapacity { n: u32, count: u64 },

    #[error("exhaustive search limits exceeded: m = {m} (max {m_max}), level cap {cap} (max {cap_max})")]
    SearchLimits {
        m: u64,
        m_max: u64,
        cap: u32,
        cap_max: u32,
    },

    #[error("level partition invalid: {0}")]
    InvalidPartition(String),

    #[error("exponent fit needs at least {min} samples, got {got}")]
    TooFewSamples { got: usize, min: usize },

    #[error("exponent fit requires positive samples, got ({m}, {value})")]
    NonpositiveSample { m: f64, value: f64 },

    #[error("precision must be at least 24 bits, got {0}")]
    PrecisionTooLow(u32),

    #[error("grid is empty")]
    EmptyGrid,
}

pub type Result<T> = std::result::Result<T, Error>;
