use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("uncertainty set needs at least one interval")]
    EmptySet,

    #[error("invalid interval [{lo}, {hi}]: endpoints must satisfy 0 <= lo < hi <= 1")]
    InvalidInterval { lo: f64, hi: f64 },

    #[error("cannot parse uncertainty set {input:?}: {reason}")]
    ParseSet { input: String, reason: String },

    #[error("probability {0} is outside [0, 1]")]
    InvalidProbability(f64),

    #[error("gain {0} violates the budget constraint |K| <= 1")]
    InvalidGain(f64),

    #[error("horizon must be at least 1")]
    ZeroHorizon,

    #[error("history of length {len} is not inside a {horizon}-flip game")]
    HistoryTooLong { len: usize, horizon: usize },

    #[error("controller covers {available} stages but {requested} were requested")]
    HorizonMismatch { available: usize, requested: usize },

    #[error("cannot parse flip history {0:?}: expected only 'H' and 'T'")]
    ParseHistory(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}
