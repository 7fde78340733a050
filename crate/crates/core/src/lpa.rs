//! Parallel label propagation over an active-vertex set.
//!
//! Workers share one label array and update it in place. A worker may read
//! a neighbor label from either the previous or the current iteration; only
//! whole 32-bit labels are ever read or written, so no value is torn.

use std::sync::atomic::{AtomicBool, AtomicU32, AtomicUsize, Ordering};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexId};
use crate::partition::{CommunityId, Partition};
use crate::scratch::with_label_weights;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LpaConfig {
    pub max_iterations: usize,
    /// Stop once an iteration changes at most this many labels.
    pub threshold: usize,
    /// Sequential sweeps in a fixed order; results are reproducible and
    /// independent of the worker count.
    pub deterministic: bool,
    /// Visit-order seed for deterministic mode; 0 keeps ascending ids.
    pub seed: u64,
}

impl Default for LpaConfig {
    fn default() -> Self {
        LpaConfig {
            max_iterations: 100,
            threshold: 0,
            deterministic: false,
            seed: 0,
        }
    }
}

impl LpaConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 {
            return Err(Error::Config("max_iterations must be at least 1".into()));
        }
        Ok(())
    }
}

/// Shared label array with relaxed word-sized reads and writes.
///
/// Propagation only copies existing labels, so every label stays below the
/// bound fixed at construction.
#[derive(Debug)]
pub struct LabelArray {
    labels: Vec<AtomicU32>,
    bound: usize,
}

impl LabelArray {
    pub fn singletons(n: usize) -> Self {
        LabelArray {
            labels: (0..n as CommunityId).map(AtomicU32::new).collect(),
            bound: n,
        }
    }

    pub fn from_labels(labels: &[CommunityId]) -> Self {
        LabelArray {
            labels: labels.iter().copied().map(AtomicU32::new).collect(),
            bound: labels.iter().max().map_or(0, |&m| m as usize + 1),
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// One past the largest label that can occur.
    pub fn label_bound(&self) -> usize {
        self.bound
    }

    #[inline]
    pub fn get(&self, v: usize) -> CommunityId {
        self.labels[v].load(Ordering::Relaxed)
    }

    #[inline]
    pub fn set(&self, v: usize, label: CommunityId) {
        self.labels[v].store(label, Ordering::Relaxed)
    }

    pub fn snapshot(&self) -> Vec<CommunityId> {
        self.labels
            .iter()
            .map(|l| l.load(Ordering::Relaxed))
            .collect()
    }
}

/// Vertices to evaluate in the current iteration, plus activation flags
/// collected for the next one.
#[derive(Debug)]
pub struct ActiveSet {
    current: Vec<VertexId>,
    next: Vec<AtomicBool>,
    /// Fixed visit order when running sequentially.
    order: Option<Vec<VertexId>>,
}

impl ActiveSet {
    /// Every vertex active, evaluated concurrently.
    pub fn all_parallel(n: usize) -> Self {
        ActiveSet {
            current: (0..n as VertexId).collect(),
            next: (0..n).map(|_| AtomicBool::new(false)).collect(),
            order: None,
        }
    }

    /// Every vertex active, evaluated one at a time in `order`.
    pub fn all_sequential(order: Vec<VertexId>) -> Self {
        ActiveSet {
            current: order.clone(),
            next: (0..order.len()).map(|_| AtomicBool::new(false)).collect(),
            order: Some(order),
        }
    }

    /// Replaces the current active vertices, keeping the visit mode.
    pub fn restricted_to(mut self, vertices: Vec<VertexId>) -> Self {
        self.current = vertices;
        self
    }

    pub fn len(&self) -> usize {
        self.current.len()
    }

    pub fn is_empty(&self) -> bool {
        self.current.is_empty()
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.current
    }

    #[inline]
    fn activate(&self, v: VertexId) {
        self.next[v as usize].store(true, Ordering::Relaxed);
    }

    fn advance(&mut self) {
        let next = &self.next;
        let take = |v: &VertexId| next[*v as usize].swap(false, Ordering::Relaxed);
        self.current = match &self.order {
            Some(order) => order.iter().copied().filter(take).collect(),
            None => (0..next.len() as VertexId)
                .into_par_iter()
                .filter(take)
                .collect(),
        };
    }
}

/// Visit order for deterministic sweeps: ascending ids for seed 0, a seeded
/// shuffle otherwise.
pub fn visit_order(n: usize, seed: u64) -> Vec<VertexId> {
    let mut order: Vec<VertexId> = (0..n as VertexId).collect();
    if seed != 0 {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        order.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
    }
    order
}

/// Label with the largest incident weight among `v`'s neighbors.
///
/// Ties keep the current label when it is among the maxima, otherwise the
/// smallest tied label wins. Loops are ignored, and a vertex without other
/// neighbors keeps its label.
pub fn best_label(g: &Graph, labels: &LabelArray, v: usize) -> CommunityId {
    let current = labels.get(v);
    with_label_weights(labels.label_bound(), |acc| {
        for (u, w) in g.neighbors(v) {
            if u as usize != v {
                acc.add(labels.get(u as usize), w);
            }
        }
        let mut best = current;
        let mut best_weight = f64::NEG_INFINITY;
        for &l in acc.touched() {
            let w = acc.get(l);
            if w > best_weight || (w == best_weight && l < best) {
                best = l;
                best_weight = w;
            }
        }
        if best_weight == f64::NEG_INFINITY || acc.get(current) == best_weight {
            current
        } else {
            best
        }
    })
}

/// One propagation iteration over the active set. Returns how many labels
/// changed; `active` then holds the vertices to evaluate next.
pub fn plp_move(g: &Graph, labels: &LabelArray, active: &mut ActiveSet) -> usize {
    let changed = AtomicUsize::new(0);
    let visit = |v: VertexId| {
        let v = v as usize;
        let best = best_label(g, labels, v);
        if best != labels.get(v) {
            labels.set(v, best);
            changed.fetch_add(1, Ordering::Relaxed);
            for (u, _) in g.neighbors(v) {
                active.activate(u);
            }
        }
    };
    if active.order.is_some() {
        active.current.iter().copied().for_each(visit);
    } else {
        active.current.par_iter().copied().for_each(visit);
    }
    active.advance();
    changed.into_inner()
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpaOutcome {
    pub partition: Partition,
    pub iterations: usize,
    /// Label changes in each iteration.
    pub updates_per_iteration: Vec<usize>,
}

pub fn lpa_run(g: &Graph, cfg: &LpaConfig) -> Result<LpaOutcome> {
    cfg.validate()?;
    let n = g.num_vertices();
    let labels = LabelArray::singletons(n);
    let mut active = if cfg.deterministic {
        ActiveSet::all_sequential(visit_order(n, cfg.seed))
    } else {
        ActiveSet::all_parallel(n)
    };
    let mut updates = Vec::new();
    if n > 0 {
        for _ in 0..cfg.max_iterations {
            let changed = plp_move(g, &labels, &mut active);
            updates.push(changed);
            if changed <= cfg.threshold {
                break;
            }
        }
    }
    Ok(LpaOutcome {
        partition: Partition::from_bounded_labels(&labels.snapshot(), labels.label_bound()),
        iterations: updates.len(),
        updates_per_iteration: updates,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{clique, disjoint_union, unit_graph};

    fn deterministic() -> LpaConfig {
        LpaConfig {
            deterministic: true,
            ..LpaConfig::default()
        }
    }

    #[test]
    fn two_triangles() {
        let g = disjoint_union(&clique(3), &clique(3));
        for cfg in [LpaConfig::default(), deterministic()] {
            let out = lpa_run(&g, &cfg).unwrap();
            assert_eq!(out.partition.assignment(), &[0, 0, 0, 1, 1, 1]);
        }
    }

    #[test]
    fn edgeless_graph() {
        let g = Graph::empty(5).unwrap();
        let out = lpa_run(&g, &LpaConfig::default()).unwrap();
        assert_eq!(out.partition, Partition::singletons(5));
        assert_eq!(out.iterations, 1);
        assert_eq!(out.updates_per_iteration, vec![0]);
    }

    #[test]
    fn empty_graph() {
        let out = lpa_run(&Graph::empty(0).unwrap(), &LpaConfig::default()).unwrap();
        assert!(out.partition.is_empty());
        assert_eq!(out.iterations, 0);
    }

    #[test]
    fn single_edge_merges() {
        let g = unit_graph(2, &[(0, 1)]);
        let labels = LabelArray::singletons(2);
        let mut active = ActiveSet::all_sequential(vec![0, 1]);
        let changed = plp_move(&g, &labels, &mut active);
        assert!(changed >= 1);
        assert_eq!(labels.get(0), labels.get(1));
    }

    #[test]
    fn unanimous_neighbors() {
        let g = unit_graph(4, &[(0, 1), (0, 2), (0, 3)]);
        let labels = LabelArray::from_labels(&[0, 7, 7, 7]);
        assert_eq!(best_label(&g, &labels, 0), 7);
    }

    #[test]
    fn star_tie_picks_smallest() {
        let g = unit_graph(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]);
        let labels = LabelArray::from_labels(&[0, 4, 4, 2, 2]);
        assert_eq!(best_label(&g, &labels, 0), 2);
        let mut active = ActiveSet::all_sequential(visit_order(5, 0)).restricted_to(vec![0]);
        plp_move(&g, &labels, &mut active);
        assert_eq!(labels.get(0), 2);
        // Every leaf neighbors the mover, so all are reactivated.
        assert_eq!(active.vertices(), &[1, 2, 3, 4]);
    }

    #[test]
    fn tie_prefers_current_label() {
        let g = unit_graph(3, &[(0, 1), (0, 2)]);
        let labels = LabelArray::from_labels(&[5, 5, 1]);
        assert_eq!(best_label(&g, &labels, 0), 5);
    }

    #[test]
    fn loops_are_ignored() {
        let g = Graph::build(2, &[(0, 0, 10.0), (0, 1, 1.0)]).unwrap();
        let labels = LabelArray::singletons(2);
        assert_eq!(best_label(&g, &labels, 0), 1);
        let only_loop = Graph::build(1, &[(0, 0, 1.0)]).unwrap();
        assert_eq!(best_label(&only_loop, &LabelArray::singletons(1), 0), 0);
    }

    #[test]
    fn unchanged_vertex_deactivates() {
        let g = unit_graph(3, &[(0, 1), (1, 2)]);
        let labels = LabelArray::from_labels(&[1, 1, 1]);
        let mut active = ActiveSet::all_sequential(vec![0, 1, 2]);
        assert_eq!(plp_move(&g, &labels, &mut active), 0);
        assert!(active.is_empty());
    }

    #[test]
    fn rejects_zero_iterations() {
        let cfg = LpaConfig {
            max_iterations: 0,
            ..LpaConfig::default()
        };
        assert!(lpa_run(&clique(3), &cfg).is_err());
    }

    #[test]
    fn seeded_order_is_a_permutation() {
        let mut order = visit_order(100, 42);
        assert_ne!(order, visit_order(100, 0));
        assert_eq!(order, visit_order(100, 42));
        order.sort_unstable();
        assert_eq!(order, visit_order(100, 0));
    }
}
