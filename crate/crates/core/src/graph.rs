//! Immutable weighted undirected graph in compressed sparse row form.
//!
//! Every non-loop edge `{u, v}` is stored as two arcs `u -> v` and `v -> u`.
//! A loop on `v` is stored once in the adjacency of `v` and once more in
//! [`Graph::loop_weight`], so the weighted degree counts it twice.

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Dense 0-based vertex index.
pub type VertexId = u32;

/// Input edge `(u, v, w)` with dense endpoints.
pub type WeightedEdge = (VertexId, VertexId, f64);

// Above this many edges the build sorts in parallel.
const PAR_SORT_THRESHOLD: usize = 1 << 16;

#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    offsets: Vec<usize>,
    neighbors: Vec<VertexId>,
    weights: Vec<f64>,
    loop_weight: Vec<f64>,
    weighted_degree: Vec<f64>,
    total_volume: f64,
    edge_count: usize,
    loop_count: usize,
}

impl Graph {
    /// Builds a graph on `n` vertices from an edge list.
    ///
    /// Edges may appear in either orientation and more than once; parallel
    /// edges are merged by summing their weights. The result does not depend
    /// on the order of `edges`.
    pub fn build(n: usize, edges: &[WeightedEdge]) -> Result<Graph> {
        if n > VertexId::MAX as usize {
            return Err(Error::TooManyVertices(n));
        }
        let mut canonical = Vec::with_capacity(edges.len());
        for &(u, v, w) in edges {
            for x in [u, v] {
                if x as usize >= n {
                    return Err(Error::VertexOutOfRange {
                        vertex: x as u64,
                        n,
                    });
                }
            }
            if !w.is_finite() || w <= 0.0 {
                return Err(Error::InvalidWeight { u, v, weight: w });
            }
            canonical.push((u.min(v), u.max(v), w));
        }

        // Sorting on the weight bits as well fixes the summation order of
        // merged duplicates, which keeps the build permutation-invariant.
        let key = |e: &(VertexId, VertexId, f64)| (e.0, e.1, e.2.to_bits());
        if canonical.len() >= PAR_SORT_THRESHOLD {
            canonical.par_sort_unstable_by_key(key);
        } else {
            canonical.sort_unstable_by_key(key);
        }
        let mut merged: Vec<(VertexId, VertexId, f64)> = Vec::with_capacity(canonical.len());
        for (u, v, w) in canonical {
            match merged.last_mut() {
                Some(last) if last.0 == u && last.1 == v => last.2 += w,
                _ => merged.push((u, v, w)),
            }
        }

        let mut arc_count = vec![0usize; n];
        let mut loop_weight = vec![0.0; n];
        let mut loop_count = 0;
        for &(u, v, w) in &merged {
            arc_count[u as usize] += 1;
            if u == v {
                loop_weight[u as usize] = w;
                loop_count += 1;
            } else {
                arc_count[v as usize] += 1;
            }
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for c in &arc_count {
            offsets.push(offsets.last().unwrap() + c);
        }
        let total_arcs = offsets[n];
        let mut neighbors = vec![0 as VertexId; total_arcs];
        let mut weights = vec![0.0; total_arcs];
        let mut cursor = offsets[..n].to_vec();
        // `merged` is sorted by (min, max). Filling the reverse arcs first
        // means every adjacency list comes out sorted by neighbor id: for a
        // vertex x, arcs from smaller endpoints (x as max) precede arcs to
        // larger ones (x as min) once both passes run in this order.
        for &(u, v, w) in &merged {
            if u != v {
                let slot = cursor[v as usize];
                neighbors[slot] = u;
                weights[slot] = w;
                cursor[v as usize] += 1;
            }
        }
        for &(u, v, w) in &merged {
            let slot = cursor[u as usize];
            neighbors[slot] = v;
            weights[slot] = w;
            cursor[u as usize] += 1;
        }

        let weighted_degree: Vec<f64> = (0..n)
            .map(|v| weights[offsets[v]..offsets[v + 1]].iter().sum::<f64>() + loop_weight[v])
            .collect();
        let total_volume = weighted_degree.iter().sum();

        Ok(Graph {
            offsets,
            neighbors,
            weights,
            loop_weight,
            weighted_degree,
            total_volume,
            edge_count: merged.len(),
            loop_count,
        })
    }

    /// Graph with `n` vertices and no edges.
    pub fn empty(n: usize) -> Result<Graph> {
        Graph::build(n, &[])
    }

    pub fn num_vertices(&self) -> usize {
        self.loop_weight.len()
    }

    /// Number of distinct edges after merging, loops included.
    pub fn num_edges(&self) -> usize {
        self.edge_count
    }

    pub fn num_loops(&self) -> usize {
        self.loop_count
    }

    pub fn is_empty(&self) -> bool {
        self.num_vertices() == 0
    }

    /// vol_w(V): sum of all weighted degrees.
    pub fn total_volume(&self) -> f64 {
        self.total_volume
    }

    pub fn offsets(&self) -> &[usize] {
        &self.offsets
    }

    pub fn neighbor_ids(&self) -> &[VertexId] {
        &self.neighbors
    }

    pub fn arc_weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn loop_weights(&self) -> &[f64] {
        &self.loop_weight
    }

    /// Weighted degree of every vertex.
    pub fn weighted_degrees(&self) -> &[f64] {
        &self.weighted_degree
    }

    fn check(&self, v: VertexId) -> Result<usize> {
        let n = self.num_vertices();
        if (v as usize) < n {
            Ok(v as usize)
        } else {
            Err(Error::VertexOutOfRange {
                vertex: v as u64,
                n,
            })
        }
    }

    /// Sum of incident edge weights plus the loop weight (loops count twice).
    pub fn degree_w(&self, v: VertexId) -> Result<f64> {
        self.check(v).map(|v| self.weighted_degree[v])
    }

    /// Number of incident edges; a loop counts once.
    pub fn degree(&self, v: VertexId) -> Result<usize> {
        self.check(v).map(|v| self.offsets[v + 1] - self.offsets[v])
    }

    pub fn loop_weight(&self, v: VertexId) -> Result<f64> {
        self.check(v).map(|v| self.loop_weight[v])
    }

    pub fn neighbors_of(&self, v: VertexId) -> Result<Neighbors<'_>> {
        self.check(v).map(|v| self.neighbors(v))
    }

    /// Unchecked-by-`Result` adjacency access for hot loops. Panics if `v` is
    /// out of range.
    #[inline]
    pub fn neighbors(&self, v: usize) -> Neighbors<'_> {
        let range = self.offsets[v]..self.offsets[v + 1];
        Neighbors {
            ids: self.neighbors[range.clone()].iter(),
            weights: self.weights[range].iter(),
        }
    }

    /// Each undirected edge once as `(u, v, w)` with `u <= v`, sorted.
    pub fn edges(&self) -> impl Iterator<Item = WeightedEdge> + '_ {
        (0..self.num_vertices()).flat_map(move |u| {
            self.neighbors(u)
                .filter(move |&(v, _)| v as usize >= u)
                .map(move |(v, w)| (u as VertexId, v, w))
        })
    }
}

/// Iterator over `(neighbor, weight)` pairs of one vertex, in ascending
/// neighbor order.
#[derive(Clone)]
pub struct Neighbors<'a> {
    ids: std::slice::Iter<'a, VertexId>,
    weights: std::slice::Iter<'a, f64>,
}

impl Iterator for Neighbors<'_> {
    type Item = (VertexId, f64);

    #[inline]
    fn next(&mut self) -> Option<Self::Item> {
        Some((*self.ids.next()?, *self.weights.next()?))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        self.ids.size_hint()
    }
}

impl ExactSizeIterator for Neighbors<'_> {}
