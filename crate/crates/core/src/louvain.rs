//! Multi-level parallel Louvain.
//!
//! Each level runs asynchronous local-moving sweeps on the current graph,
//! then collapses every community into a supervertex. Levels repeat until a
//! local-moving phase moves nothing.

use std::sync::atomic::{AtomicBool, AtomicU32, AtomicUsize, Ordering};
use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::atomic::AtomicF64;
use crate::error::{Error, Result};
use crate::graph::{Graph, VertexId, WeightedEdge};
use crate::lpa::visit_order;
use crate::partition::{CommunityId, Partition};
use crate::quality::{modularity, move_gain_score};
use crate::scratch::with_label_weights;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LouvainConfig {
    /// Local-moving sweep cap per level.
    pub max_iterations: usize,
    pub max_levels: usize,
    /// Sequential sweeps in a fixed order; see [`crate::lpa::LpaConfig`].
    pub deterministic: bool,
    pub seed: u64,
}

impl Default for LouvainConfig {
    fn default() -> Self {
        LouvainConfig {
            max_iterations: 20,
            max_levels: 32,
            deterministic: false,
            seed: 0,
        }
    }
}

impl LouvainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iterations == 0 || self.max_levels == 0 {
            return Err(Error::Config(
                "max_iterations and max_levels must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// Working arrays of one local-moving phase.
///
/// `vol_com` is only guaranteed to match `com_id` at sweep barriers; during
/// a sweep a move's subtract and add are two separate atomic updates.
#[derive(Debug)]
pub struct LouvainState {
    com_id: Vec<AtomicU32>,
    vol_vertex: Vec<f64>,
    vol_com: Vec<AtomicF64>,
    need_check: Vec<AtomicBool>,
    tmp_need_check: Vec<AtomicBool>,
    total_volume: f64,
}

impl LouvainState {
    /// Singleton communities, every vertex flagged for checking.
    pub fn new(g: &Graph) -> Self {
        let n = g.num_vertices();
        let degrees = g.weighted_degrees();
        LouvainState {
            com_id: (0..n as CommunityId).map(AtomicU32::new).collect(),
            vol_vertex: degrees.to_vec(),
            vol_com: degrees.iter().map(|&d| AtomicF64::new(d)).collect(),
            need_check: (0..n).map(|_| AtomicBool::new(true)).collect(),
            tmp_need_check: (0..n).map(|_| AtomicBool::new(false)).collect(),
            total_volume: g.total_volume(),
        }
    }

    pub fn len(&self) -> usize {
        self.com_id.len()
    }

    pub fn is_empty(&self) -> bool {
        self.com_id.is_empty()
    }

    #[inline]
    pub fn community_of(&self, v: usize) -> CommunityId {
        self.com_id[v].load(Ordering::Relaxed)
    }

    pub fn community_ids(&self) -> Vec<CommunityId> {
        self.com_id
            .iter()
            .map(|c| c.load(Ordering::Relaxed))
            .collect()
    }

    /// Maintained community volumes, indexed by raw community id.
    pub fn community_volumes(&self) -> Vec<f64> {
        self.vol_com.iter().map(AtomicF64::load).collect()
    }

    /// Community volumes recomputed from `com_id` and `vol_vertex`.
    pub fn recompute_community_volumes(&self) -> Vec<f64> {
        let mut vol = vec![0.0; self.len()];
        for (c, d) in self.community_ids().into_iter().zip(&self.vol_vertex) {
            vol[c as usize] += d;
        }
        vol
    }

    pub fn needs_check(&self, v: usize) -> bool {
        self.need_check[v].load(Ordering::Relaxed)
    }

    pub fn partition(&self) -> Partition {
        Partition::from_bounded_labels(&self.community_ids(), self.len())
    }

    /// Best strictly improving target for `v`, if any. Ties go to the
    /// smallest community id.
    fn best_move(&self, g: &Graph, v: usize) -> Option<CommunityId> {
        let degree = self.vol_vertex[v];
        if degree == 0.0 {
            return None;
        }
        let current = self.community_of(v);
        with_label_weights(self.len(), |acc| {
            for (u, w) in g.neighbors(v) {
                if u as usize != v {
                    acc.add(self.community_of(u as usize), w);
                }
            }
            let cut_current = acc.get(current);
            let vol_current = self.vol_com[current as usize].load() - degree;
            let mut best = None;
            let mut best_score = 0.0;
            for &c in acc.touched() {
                if c == current {
                    continue;
                }
                let score = move_gain_score(
                    acc.get(c),
                    cut_current,
                    degree,
                    self.vol_com[c as usize].load(),
                    vol_current,
                    self.total_volume,
                );
                let better = match best {
                    None => score > best_score,
                    Some(b) => score > best_score || (score == best_score && c < b),
                };
                if better {
                    best = Some(c);
                    best_score = score;
                }
            }
            best
        })
    }

    fn try_move(&self, g: &Graph, v: usize) -> bool {
        if !self.needs_check(v) {
            return false;
        }
        match self.best_move(g, v) {
            Some(target) => {
                let degree = self.vol_vertex[v];
                let current = self.community_of(v);
                self.vol_com[current as usize].fetch_add(-degree);
                self.vol_com[target as usize].fetch_add(degree);
                self.com_id[v].store(target, Ordering::Relaxed);
                self.tmp_need_check[v].store(true, Ordering::Relaxed);
                true
            }
            None => false,
        }
    }

    /// One sweep over the flagged vertices; returns the number of moves.
    /// With `order`, vertices are visited one at a time in that order.
    pub fn sweep(&self, g: &Graph, order: Option<&[VertexId]>) -> usize {
        match order {
            Some(order) => order
                .iter()
                .filter(|&&v| self.try_move(g, v as usize))
                .count(),
            None => {
                let moves = AtomicUsize::new(0);
                (0..self.len()).into_par_iter().for_each(|v| {
                    if self.try_move(g, v) {
                        moves.fetch_add(1, Ordering::Relaxed);
                    }
                });
                moves.into_inner()
            }
        }
    }

    /// Barrier step: movers and their neighbors are checked next sweep.
    pub fn finish_sweep(&self, g: &Graph) {
        self.need_check
            .par_iter()
            .for_each(|f| f.store(false, Ordering::Relaxed));
        (0..self.len()).into_par_iter().for_each(|v| {
            if self.tmp_need_check[v].swap(false, Ordering::Relaxed) {
                self.need_check[v].store(true, Ordering::Relaxed);
                for (u, _) in g.neighbors(v) {
                    self.need_check[u as usize].store(true, Ordering::Relaxed);
                }
            }
        });
    }

    /// Sweeps until nothing moves or `max_sweeps` is reached, calling
    /// `on_barrier` after every sweep. Returns moves per sweep.
    pub fn run(
        &self,
        g: &Graph,
        max_sweeps: usize,
        order: Option<&[VertexId]>,
        mut on_barrier: impl FnMut(&LouvainState),
    ) -> Vec<usize> {
        let mut moves = Vec::new();
        for _ in 0..max_sweeps {
            let moved = self.sweep(g, order);
            self.finish_sweep(g);
            moves.push(moved);
            on_barrier(self);
            if moved == 0 {
                break;
            }
        }
        moves
    }
}

fn level_order(n: usize, cfg: &LouvainConfig) -> Option<Vec<VertexId>> {
    cfg.deterministic.then(|| visit_order(n, cfg.seed))
}

/// Local-moving phase from singletons; returns the normalized partition.
pub fn local_moving(g: &Graph, cfg: &LouvainConfig) -> Result<Partition> {
    cfg.validate()?;
    let state = LouvainState::new(g);
    let order = level_order(g.num_vertices(), cfg);
    state.run(g, cfg.max_iterations, order.as_deref(), |_| {});
    Ok(state.partition())
}

/// Coarse graph with one supervertex per community.
///
/// Edge endpoints are replaced by their community ids and edges with equal
/// endpoint pairs are merged by summing weights; intra-community edges
/// become loops. Supervertex `c` represents community `c` of `p`.
pub fn aggregate(g: &Graph, p: &Partition) -> Result<Graph> {
    if p.len() != g.num_vertices() {
        return Err(Error::SizeMismatch {
            partition: p.len(),
            graph: g.num_vertices(),
        });
    }
    let labels = p.assignment();
    let edges: Vec<WeightedEdge> = (0..g.num_vertices())
        .into_par_iter()
        .flat_map_iter(|u| {
            let cu = labels[u];
            g.neighbors(u)
                .filter(move |&(v, _)| v as usize >= u)
                .map(move |(v, w)| (cu, labels[v as usize], w))
        })
        .collect();
    Graph::build(p.num_communities(), &edges)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Level {
    /// Partition of this level's graph (level 0 is the input graph).
    pub partition: Partition,
    /// Supervertex graph built from `partition`; `None` on the converged
    /// last level.
    pub aggregated: Option<Graph>,
    /// Local-moving moves per sweep.
    pub moves_per_sweep: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dendrogram {
    pub levels: Vec<Level>,
    /// Composition of all level partitions, on the input vertices.
    pub final_partition: Partition,
    /// Modularity of the flattened partition after each level, measured on
    /// the input graph (0 for a graph without edges).
    pub modularity_per_level: Vec<f64>,
}

impl Dendrogram {
    pub fn final_modularity(&self) -> f64 {
        self.modularity_per_level.last().copied().unwrap_or(0.0)
    }

    /// Flattened partition after each level.
    pub fn flattened_levels(&self) -> Result<Vec<Partition>> {
        let Some(first) = self.levels.first() else {
            return Ok(Vec::new());
        };
        let mut flat = first.partition.clone();
        let mut out = vec![flat.clone()];
        for level in &self.levels[1..] {
            flat = flat.compose(&level.partition)?;
            out.push(flat.clone());
        }
        Ok(out)
    }
}

/// Wall-clock time per phase, summed over levels.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PhaseTimings {
    pub local_moving: Duration,
    pub aggregation: Duration,
    /// Per-level modularity evaluation; not part of the algorithm proper.
    pub modularity: Duration,
    pub sweeps: usize,
    pub levels: usize,
}

fn flat_modularity(g: &Graph, p: &Partition) -> Result<f64> {
    match modularity(g, p) {
        Err(Error::ZeroVolume) => Ok(0.0),
        other => other,
    }
}

pub fn louvain_run(g: &Graph, cfg: &LouvainConfig) -> Result<(Dendrogram, PhaseTimings)> {
    cfg.validate()?;
    let mut timings = PhaseTimings::default();
    let mut levels: Vec<Level> = Vec::new();
    let mut modularity_per_level = Vec::new();
    let mut flat = Partition::singletons(g.num_vertices());
    if g.is_empty() {
        let dendrogram = Dendrogram {
            levels,
            final_partition: flat,
            modularity_per_level,
        };
        return Ok((dendrogram, timings));
    }

    let mut current: Option<Graph> = None;
    for _ in 0..cfg.max_levels {
        let graph = current.as_ref().unwrap_or(g);

        let start = Instant::now();
        let state = LouvainState::new(graph);
        let order = level_order(graph.num_vertices(), cfg);
        let moves_per_sweep = state.run(graph, cfg.max_iterations, order.as_deref(), |_| {});
        let partition = state.partition();
        timings.local_moving += start.elapsed();
        timings.sweeps += moves_per_sweep.len();

        let done = partition.num_communities() == graph.num_vertices();
        let aggregated = if done {
            None
        } else {
            let start = Instant::now();
            let coarse = aggregate(graph, &partition)?;
            timings.aggregation += start.elapsed();
            Some(coarse)
        };

        let start = Instant::now();
        flat = flat.compose(&partition)?;
        modularity_per_level.push(flat_modularity(g, &flat)?);
        timings.modularity += start.elapsed();
        current = aggregated.clone();
        levels.push(Level {
            partition,
            aggregated,
            moves_per_sweep,
        });
        if done {
            break;
        }
    }
    timings.levels = levels.len();
    let dendrogram = Dendrogram {
        levels,
        final_partition: flat,
        modularity_per_level,
    };
    Ok((dendrogram, timings))
}
