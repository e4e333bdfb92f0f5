use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("partition size {m} out of range for a {n}x{n} matrix")]
    Partition { m: usize, n: usize },

    #[error("invalid permutation: {0}")]
    Permutation(String),

    #[error("numeric error: {0}")]
    Numeric(String),

    #[error("matrix is not symmetric (entry ({row}, {col}))")]
    Symmetry { row: usize, col: usize },

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("node {node} is not reachable from the leader set")]
    Coverage { node: usize },

    #[error("structure violation: {0}")]
    Structure(String),

    #[error("graph is not a tree: {0}")]
    NotATree(String),

    #[error("tree depth {depth} is not supported here (expected {expected})")]
    Depth { depth: usize, expected: &'static str },

    #[error("input vector has a zero entry at position {index}")]
    ZeroGamma { index: usize },

    #[error("the pair is not herdable")]
    NotHerdable,

    #[error("certificate assembly failed: {0}")]
    CertificateAssembly(String),
}

pub type Result<T> = std::result::Result<T, Error>;
