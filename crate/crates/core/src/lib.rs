//! Shared-memory parallel community detection.
//!
//! Graphs are immutable weighted CSR structures ([`Graph`]). Two detectors
//! run on them: asynchronous label propagation ([`lpa`]) and multi-level
//! Louvain modularity optimization ([`louvain`]). [`quality`] evaluates
//! modularity and move gains, and [`ingest`] reads SNAP edge lists.
//!
//! Parallel kernels run on the current rayon pool; size it with
//! `rayon::ThreadPoolBuilder` to control the worker count.

#[cfg(test)]
macro_rules! assert_close {
    ($a:expr, $b:expr, $tol:expr) => {{
        let (a, b): (f64, f64) = ($a, $b);
        assert!((a - b).abs() <= $tol, "{a} != {b} (tol {})", $tol);
    }};
}

mod atomic;
pub mod error;
pub mod generate;
pub mod graph;
pub mod ingest;
pub mod louvain;
pub mod lpa;
pub mod partition;
pub mod quality;
mod scratch;

pub use error::{Error, Result};
pub use graph::{Graph, VertexId, WeightedEdge};
pub use ingest::{parse_snap, read_assignment, write_assignment, RawEdgeList, RawId};
pub use louvain::{aggregate, local_moving, louvain_run, Dendrogram, LouvainConfig, PhaseTimings};
pub use lpa::{lpa_run, LpaConfig, LpaOutcome};
pub use partition::{CommunityId, Partition};
pub use quality::{brute_force_best_partition, cut_between, delta_q, modularity};
