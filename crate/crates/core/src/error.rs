use thiserror::Error;

/// Errors raised anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("duplicate graph id `{0}`")]
    DuplicateId(String),

    #[error("graph `{id}` is invalid: {violations:?}")]
    InvalidGraph { id: String, violations: Vec<Violation> },

    #[error("alphabet must not be empty")]
    EmptyAlphabet,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid cost model: {0}")]
    InvalidCostModel(String),

    #[error("graph has {nodes} nodes, exceeding the exact-search cap of {cap}")]
    ResourceGuard { nodes: usize, cap: usize },

    #[error("cost matrix is not square: row {row} has {len} entries, expected {expected}")]
    NonSquare { row: usize, len: usize, expected: usize },

    #[error("cost matrix entry ({row}, {col}) is negative")]
    NegativeCost { row: usize, col: usize },

    #[error("arithmetic overflow while scaling costs")]
    Overflow,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("cannot build an index over an empty collection")]
    EmptyInput,

    #[error("radius must be non-negative")]
    NegativeRadius,

    #[error("index/metric mismatch: {0}")]
    Mismatch(String),

    #[error("unsupported index format version {found}, expected {expected}")]
    VersionMismatch { found: u64, expected: u64 },

    #[error("item collection does not match index: {0}")]
    ChecksumMismatch(String),

    #[error("malformed index document: {0}")]
    Malformed(String),

    #[error("method disagreement on dataset {dataset}, query {query}, radius {radius}: {detail}")]
    AnswerMismatch { dataset: String, query: String, radius: String, detail: String },

    #[error("infeasible benchmark cell: {0}")]
    Infeasible(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// A single broken graph invariant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    EndpointOutOfRange { u: usize, v: usize, nodes: usize },
    SelfLoop { node: usize },
    DuplicateEdge { u: usize, v: usize },
    NotCanonical { u: usize, v: usize },
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Violation::EndpointOutOfRange { u, v, nodes } => {
                write!(f, "endpoint out of range: edge ({u},{v}) with {nodes} nodes")
            }
            Violation::SelfLoop { node } => write!(f, "self-loop at node {node}"),
            Violation::DuplicateEdge { u, v } => write!(f, "duplicate edge ({u},{v})"),
            Violation::NotCanonical { u, v } => write!(f, "edge ({u},{v}) not stored with u < v"),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
