use alloc::string::String;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("invalid candidate name {0:?}")]
    InvalidCandidateName(String),
    #[error("unknown candidate {0:?}")]
    UnknownCandidate(String),
    #[error("stage {stage} out of range 1..={candidates}")]
    StageOutOfRange { stage: usize, candidates: usize },
    #[error("position {requested} is not an improvement over current position {current}")]
    PositionNotAnImprovement { current: usize, requested: usize },
    #[error("malformed witness: {0}")]
    MalformedWitness(String),
    #[error("search budget of {limit} nodes exceeded")]
    BudgetExceeded { limit: u64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = core::result::Result<T, Error>;
