use thiserror::Error;

use crate::graph::VertexId;

/// Errors raised across the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("self-loop at vertex {0}")]
    SelfLoop(VertexId),
    #[error("vertex {vertex} out of range (graph has {n} vertices)")]
    VertexOutOfRange { vertex: VertexId, n: usize },
    #[error("identified vertices {0:?} do not form a clique")]
    NotAClique(Vec<VertexId>),
    #[error("bad clique identification: {0}")]
    BadIdentification(String),
    #[error("invalid embedding: {0}")]
    InvalidEmbedding(String),
    #[error("instance too large for exhaustive enumeration ({n} > {limit} vertices)")]
    TooLarge { n: usize, limit: usize },
    #[error("graph has no capacities")]
    MissingCapacities,
    #[error("graph has no weights")]
    MissingWeights,
    #[error("graph is outside the configured family: {0}")]
    NotInFamily(String),
    #[error("vertices {0:?} do not share a face")]
    NotAFace(Vec<VertexId>),
    #[error("no mimicking network with at most {max_size} vertices realizes pattern {pattern}")]
    NotFound { pattern: String, max_size: usize },
    #[error("weight differences are empty")]
    UnanchoredDiffs,
    #[error("cannot realize weight differences on this network")]
    UnrealizableDiffs,
    #[error("matrix dimensions do not chain: {0}")]
    DimensionMismatch(String),
    #[error("witness log is inconsistent: {0}")]
    CorruptLog(String),
    #[error("too many terminals ({0} > 6)")]
    TooManyTerminals(usize),
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
