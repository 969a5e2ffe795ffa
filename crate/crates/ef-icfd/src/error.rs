use thiserror::Error;

/// Errors surfaced by instance validation, the numeric layer and the solvers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("duplicate vertex id `{0}`")]
    DuplicateVertex(String),
    #[error("duplicate agent id `{0}`")]
    DuplicateAgent(String),
    #[error("unknown vertex id `{0}`")]
    UnknownVertex(String),
    #[error("unknown agent id `{0}`")]
    UnknownAgent(String),
    #[error("p exceeds item count (p = {p}, m = {m})")]
    BudgetTooLarge { p: usize, m: usize },
    #[error("edge ({0}, {1}) is a self-loop")]
    SelfLoop(String, String),
    #[error("missing valuation entry for agent `{agent}` on vertex `{vertex}`")]
    MissingValuation { agent: String, vertex: String },
    #[error("valuation for agent `{agent}` on vertex `{vertex}` is not a nonnegative integer: {text}")]
    BadValuation {
        agent: String,
        vertex: String,
        text: String,
    },
    #[error("cannot parse `{0}` as a rational number")]
    BadRational(String),
    #[error("epsilon must be positive, got {0}")]
    NonPositiveEps(String),
    #[error("epsilon {0} is too small: its dyadic bucket base rounds to zero")]
    EpsTooSmall(String),
    #[error("logarithm base must exceed 1, got {0}")]
    BadLogBase(String),
    #[error("logarithm argument must be nonnegative, got {0}")]
    NegativeLogArgument(String),
    #[error("malformed class partition: {0}")]
    BadPartition(String),
    #[error("enumeration guard exceeded: {task} needs about {needed} steps (limit {limit})")]
    GuardExceeded {
        task: String,
        needed: String,
        limit: u64,
    },
    #[error("instance has {m} vertices; the approximation solver supports at most 64")]
    TooManyVertices { m: usize },
    #[error("vector-sum instance malformed: {0}")]
    BadVectorSum(String),
    #[error("reduction requires every vector entry at most n^3 = {bound}; entry {entry} exceeds it")]
    ReductionEntryTooLarge { entry: String, bound: String },
    #[error("invalid generator parameters: {0}")]
    BadGenParams(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
