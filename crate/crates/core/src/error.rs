use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: self-loop on node `{node}`")]
    SelfLoop { line: usize, node: String },

    #[error("line {line}: expected two node tokens, found {found}")]
    TokenCount { line: usize, found: usize },

    #[error("node list line {line}: node `{node}` has no edges; pass allow_isolated to keep it")]
    IsolatedNode { line: usize, node: String },

    #[error("node id {id} out of range for graph with {n} nodes")]
    NodeOutOfRange { id: usize, n: usize },

    #[error("label vector has length {got}, expected {expected}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("invalid chain configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid hyperparameters: {0}")]
    InvalidHyperparameters(String),

    #[error("invalid probability {name} = {value}; must lie in [0, 1]")]
    InvalidProbability { name: &'static str, value: f64 },

    #[error("invalid generator specification: {0}")]
    InvalidGenerator(String),

    #[error("empty sample set")]
    EmptySamples,

    #[error("co-assignment tallies were not collected; rerun with --coassign")]
    CoassignmentDisabled,

    #[error("full label draws were not stored; rerun with --store-labels")]
    LabelsNotStored,

    #[error("exact enumeration supports at most {limit} nodes, graph has {n}")]
    TooManyNodes { n: usize, limit: usize },

    #[error("unknown dataset `{0}` (available: karate, dolphins)")]
    UnknownDataset(String),

    #[error("dataset `{name}` is not bundled with this build; {hint}")]
    DatasetUnavailable { name: String, hint: &'static str },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
