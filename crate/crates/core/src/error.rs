use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),

    #[error("edge index {index} out of range (graph has {len} edges)")]
    EdgeIndex { index: usize, len: usize },

    #[error("invalid graph: {}", .0.join("; "))]
    InvalidGraph(Vec<String>),

    #[error("{0} requires an undirected graph")]
    DirectedInput(&'static str),

    #[error("event/graph direction mismatch: {0}")]
    DirectionMismatch(String),

    #[error(
        "{edges} random edges exceed the exact-enumeration limit of {limit}; \
         raise the limit (PERC_MAX_EDGES / --max-edges) or use Monte Carlo"
    )]
    EdgeLimit { edges: usize, limit: usize },

    #[error("deletion-contraction memo exceeded its budget of {limit} entries")]
    MemoBudget { limit: usize },

    #[error("conditioning event has probability zero")]
    ZeroProbabilityCondition,

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Errors caused by a compute budget rather than by the input itself.
    pub fn is_resource_limit(&self) -> bool {
        matches!(self, Error::EdgeLimit { .. } | Error::MemoBudget { .. })
    }
}
