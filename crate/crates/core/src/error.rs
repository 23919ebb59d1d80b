//! Error type shared by the whole crate. Node ids in messages are 1-based,
//! matching the file formats.

use thiserror::Error;

/// Broad failure classes, used by the CLI to pick an exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Parse,
    Precondition,
    Budget,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("adjacency matrix is not symmetric at ({}, {})", row + 1, col + 1)]
    Asymmetric { row: usize, col: usize },
    #[error("adjacency matrix has a nonzero diagonal entry at node {}", .0 + 1)]
    NonzeroDiagonal(usize),
    #[error("duplicate edge ({}, {})", .0 + 1, .1 + 1)]
    DuplicateEdge(usize, usize),
    #[error("self loop at node {}", .0 + 1)]
    SelfLoop(usize),
    #[error("node id {} out of range 1..={n}", id + 1)]
    NodeOutOfRange { id: usize, n: usize },
    #[error("node set is empty")]
    EmptySet,
    #[error("node set must be a proper subset of the vertex set")]
    NotProperSubset,
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("invalid spanning tree: {0}")]
    InvalidTree(String),
    #[error("graph is not connected")]
    Disconnected,
    #[error("k = {k} is out of range 1..={n}")]
    KOutOfRange { k: usize, n: usize },
    #[error("partition has {found} blocks but k = {expected}")]
    KMismatch { expected: usize, found: usize },
    #[error("edge ({}, {}) is not in the tree", .0 + 1, .1 + 1)]
    EdgeNotInTree(usize, usize),
    #[error("index {index} out of range for a {size}x{size} matrix")]
    IndexOutOfRange { index: usize, size: usize },
    #[error("enumeration budget exceeded: {what} = {needed} > limit {limit}")]
    BudgetExceeded {
        what: &'static str,
        needed: String,
        limit: String,
    },
    #[error("sampled partition {0} is outside the exact support")]
    OutsideSupport(String),
    #[error("tally holds {found} samples, expected {expected}")]
    SampleCount { found: u64, expected: u64 },
    #[error("{samples} samples is below the minimum of {min}")]
    TooFewSamples { samples: u64, min: u64 },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Parse { .. }
            | Error::Asymmetric { .. }
            | Error::NonzeroDiagonal(_)
            | Error::DuplicateEdge(..)
            | Error::SelfLoop(_)
            | Error::NodeOutOfRange { .. }
            | Error::Io(_) => ErrorKind::Parse,
            Error::BudgetExceeded { .. } => ErrorKind::Budget,
            _ => ErrorKind::Precondition,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
