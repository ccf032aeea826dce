use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("citation sample `{0}` is empty")]
    EmptySample(String),

    #[error("probability {0} is outside [0, 1]")]
    ProbabilityOutOfRange(f64),

    #[error("number of trials must be positive")]
    NonPositiveTrials,

    #[error("index j = {j} is outside 1..={n}")]
    IndexOutOfRange { j: i64, n: u64 },

    #[error("quantile level {0} is outside (0, 1)")]
    LevelOutOfRange(f64),

    #[error("at least two scholars are required, got {0}")]
    TooFewScholars(usize),

    #[error("invalid model parameter: {0}")]
    InvalidModel(String),

    #[error("invalid experiment config `{key}`: {reason}")]
    InvalidConfig { key: String, reason: String },

    #[error("enumeration of {outcomes} outcomes exceeds the limit of {limit}")]
    EnumerationTooLarge { outcomes: u128, limit: u128 },
}

pub type Result<T> = std::result::Result<T, Error>;
