//! Small deterministic graph generators used by tests, benches and examples.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::{Graph, VertexId, WeightedEdge};
use crate::partition::Partition;

/// Two triangles `{0,1,2}` and `{3,4,5}` joined by the bridge `2-3`.
pub fn barbell() -> Graph {
    let edges = [(0, 1), (0, 2), (1, 2), (3, 4), (3, 5), (4, 5), (2, 3)];
    unit_graph(6, &edges)
}

pub fn clique(n: usize) -> Graph {
    let mut edges = Vec::new();
    for u in 0..n as VertexId {
        for v in u + 1..n as VertexId {
            edges.push((u, v));
        }
    }
    unit_graph(n, &edges)
}

/// Builds a unit-weight graph from `(u, v)` pairs.
pub fn unit_graph(n: usize, pairs: &[(VertexId, VertexId)]) -> Graph {
    let edges: Vec<WeightedEdge> = pairs.iter().map(|&(u, v)| (u, v, 1.0)).collect();
    Graph::build(n, &edges).expect("generator produced an invalid edge")
}

/// Vertex-disjoint union; `b`'s vertices are shifted past `a`'s.
pub fn disjoint_union(a: &Graph, b: &Graph) -> Graph {
    let shift = a.num_vertices() as VertexId;
    let edges: Vec<WeightedEdge> = a
        .edges()
        .chain(b.edges().map(|(u, v, w)| (u + shift, v + shift, w)))
        .collect();
    Graph::build(a.num_vertices() + b.num_vertices(), &edges).expect("union of valid graphs")
}

/// G(n, p) with optional integer weights in `1..=max_weight` and loops with
/// probability `loop_p`.
pub fn random_graph(n: usize, p: f64, max_weight: u32, loop_p: f64, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for u in 0..n as VertexId {
        if rng.gen_bool(loop_p) {
            edges.push((u, u, rng.gen_range(1..=max_weight) as f64));
        }
        for v in u + 1..n as VertexId {
            if rng.gen_bool(p) {
                edges.push((u, v, rng.gen_range(1..=max_weight) as f64));
            }
        }
    }
    Graph::build(n, &edges).expect("generator produced an invalid edge")
}

/// Planted partition: `groups` blocks of `size` vertices; each vertex draws
/// `internal_degree` random partners inside its block and `external_degree`
/// outside. Returns the graph and the planted ground truth.
pub fn planted_partition(
    groups: usize,
    size: usize,
    internal_degree: usize,
    external_degree: usize,
    seed: u64,
) -> (Graph, Partition) {
    let n = groups * size;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::with_capacity(n * (internal_degree + external_degree));
    for v in 0..n {
        let block = v / size;
        for _ in 0..internal_degree {
            let u = block * size + rng.gen_range(0..size);
            if u != v {
                edges.push((v as VertexId, u as VertexId, 1.0));
            }
        }
        for _ in 0..external_degree {
            let u = rng.gen_range(0..n);
            if u / size != block {
                edges.push((v as VertexId, u as VertexId, 1.0));
            }
        }
    }
    let graph = Graph::build(n, &edges).expect("generator produced an invalid edge");
    let truth = Partition::from_labels((0..n).map(|v| (v / size) as u32));
    (graph, truth)
}

/// Uniform labels in `0..max_k`, normalized.
pub fn random_partition(n: usize, max_k: usize, seed: u64) -> Partition {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Partition::from_labels((0..n).map(|_| rng.gen_range(0..max_k.max(1)) as u32))
}
