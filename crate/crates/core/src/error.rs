use thiserror::Error;

/// Error type shared by every module in this crate.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("good {id:?} has negative cost {cost}")]
    NegativeCost { id: String, cost: i64 },

    #[error("duplicate good id {id:?}")]
    DuplicateGoodId { id: String },

    #[error("duplicate agent id {id:?}")]
    DuplicateAgentId { id: String },

    #[error("agent {agent:?} approves unknown good {id:?}")]
    UnknownGoodInApproval { agent: String, id: String },

    #[error("instance has no agents")]
    EmptyAgentList,

    #[error("bundle references unknown good {id:?}")]
    UnknownGoodInBundle { id: String },

    #[error("allocation references unknown agent {id:?}")]
    UnknownAgentInAllocation { id: String },

    #[error("good {id:?} appears in more than one bundle")]
    OverlappingBundles { id: String },

    #[error("good {id:?} is missing from the allocation")]
    IncompleteAllocation { id: String },

    #[error("exact search budget exceeded: {what}")]
    InstanceTooLarge { what: String },

    #[error("expected {expected} agents, got {actual}")]
    WrongAgentCount { expected: usize, actual: usize },

    /// Internal invariant violation: a valid bundle pair is mathematically
    /// guaranteed to exist whenever the caller meets the preconditions.
    #[error("no bundle pair satisfies the pair-overlap bounds")]
    SelectionImpossible,

    #[error("approval sets of agents {} and {} cross", pair.0, pair.1)]
    NotLaminar { pair: (usize, usize) },

    #[error("recursion limit exceeded")]
    RecursionLimit,

    #[error("picking-sequence index {index} out of range for {agents} agents")]
    InvalidSequenceIndex { index: usize, agents: usize },

    #[error("expected {expected} goods, got {actual}")]
    WrongGoodsCount { expected: usize, actual: usize },

    #[error("need at least {minimum} agents, got {actual}")]
    TooFewAgents { minimum: usize, actual: usize },

    /// The guaranteed-item rank n-k is zero, so no single item can be named.
    #[error("guaranteed-item rank is zero for this agent")]
    DegenerateRank,

    #[error("invalid parameter: {what}")]
    InvalidParameter { what: String },

    #[error("unknown experiment suite {name:?}")]
    UnknownSuite { name: String },

    #[error("malformed JSON: {0}")]
    Json(String),
}

impl From<serde_json::Error> for Error {
    fn from(err: serde_json::Error) -> Self {
        Error::Json(err.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
