use thiserror::Error;

/// Errors surfaced by the library. Each variant names the violated
/// precondition or the failing construction step.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("duplicate vertex label {0}")]
    DuplicateLabel(String),

    #[error("unknown vertex {0}")]
    UnknownVertex(String),

    #[error("{0} is not an edge of the host graph")]
    NotAnEdge(String),

    #[error("graph is not a tree: {0}")]
    NotATree(String),

    #[error("vertex {0} is not a leaf")]
    NotALeaf(String),

    #[error("edge colouring is not proper: {0}")]
    ImproperColouring(String),

    #[error("colouring does not match host graph: {0}")]
    ColouringMismatch(String),

    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("graph file format: {0}")]
    Format(String),

    #[error("edge set does not percolate")]
    DoesNotPercolate,

    #[error("brute-force refused: {edges} edges exceeds cap {cap}")]
    CapExceeded { edges: usize, cap: usize },

    #[error("witness family defect [{provenance}]: {msg}")]
    FamilyDefect { provenance: String, msg: String },

    #[error("construction defect: {0}")]
    Construction(String),

    #[error("hypothesis not satisfied: {0}")]
    Hypothesis(String),

    #[error("no exact value certified: lower {lower}, upper {upper}")]
    OnlyBounds { lower: u64, upper: u64 },

    #[error("zero vector nowhere nonzero on the colour selections (precondition violated)")]
    NoNonzeroEvaluation,

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
