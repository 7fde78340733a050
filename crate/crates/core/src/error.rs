use thiserror::Error;

use crate::graph::VertexId;

#[derive(Debug, Error)]
pub enum Error {
    #[error("vertex {vertex} out of range for graph with {n} vertices")]
    VertexOutOfRange { vertex: u64, n: usize },
    #[error("edge ({u}, {v}) has invalid weight {weight}; weights must be finite and positive")]
    InvalidWeight {
        u: VertexId,
        v: VertexId,
        weight: f64,
    },
    #[error("{0} vertices exceed the 32-bit vertex id space")]
    TooManyVertices(usize),
    #[error("community {community} out of range ({k} communities)")]
    CommunityOutOfRange { community: u32, k: usize },
    #[error("partition covers {partition} vertices but graph has {graph}")]
    SizeMismatch { partition: usize, graph: usize },
    #[error("graph has zero total volume; modularity is undefined")]
    ZeroVolume,
    #[error("exhaustive search is limited to {max} vertices, got {n}")]
    TooLargeForEnumeration { n: usize, max: usize },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
