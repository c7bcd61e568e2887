use thiserror::Error;

/// Errors raised while evaluating indices or estimating their variances.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected} groups, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid mass function: {0}")]
    InvalidMass(String),

    #[error("invalid grouped summary: {0}")]
    InvalidSummary(String),

    #[error("group {index} has zero mass where the divergence is undefined")]
    ZeroMassGroup { index: usize },

    #[error("group `{group}` has a zero mean outcome where the index is undefined")]
    ZeroMeanGroup { group: String },

    #[error("result is not finite")]
    NonFinite,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("survey dataset is empty")]
    EmptyDataset,

    #[error("invalid record {index}: {reason}")]
    InvalidRecord { index: usize, reason: String },

    #[error("declared group `{0}` has no records")]
    EmptyGroup(String),

    #[error("stratum `{0}` has a single PSU")]
    SingletonStratum(String),

    #[error("stratum `{stratum}` has {psus} PSUs; balanced repeated replication needs exactly 2")]
    NotTwoPsuDesign { stratum: String, psus: usize },

    #[error("no Hadamard matrix of order {0} can be constructed")]
    HadamardUnavailable(usize),

    #[error("record {index} has non-binary outcome {value}")]
    NonBinaryOutcome { index: usize, value: f64 },

    #[error("relative change requested at a zero baseline index")]
    ZeroBaseline,

    #[error("replicate {replicate}: {source}")]
    Replicate {
        replicate: usize,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
