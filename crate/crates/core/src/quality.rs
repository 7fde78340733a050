//! Modularity, cuts, volumes and the single-vertex move gain.
//!
//! With `V = vol_w(V)`, modularity is
//! `Q = sum_c (vol_w(c) - cut_w(c)) / V - vol_w(c)^2 / V^2`,
//! and moving `v` from `A` to `B` changes it by
//! `2 * ((cut_w(v, B-) - cut_w(v, A-)) / V - deg_w(v) * (vol_w(B-) - vol_w(A-)) / V^2)`
//! where `A-`, `B-` exclude `v`. Loops never enter a cut but count twice in
//! every volume.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexId};
use crate::partition::{CommunityId, Partition};

/// Largest graph [`brute_force_best_partition`] accepts.
pub const MAX_ENUMERATION_VERTICES: usize = 12;

fn check_cover(g: &Graph, p: &Partition) -> Result<()> {
    if p.len() != g.num_vertices() {
        return Err(Error::SizeMismatch {
            partition: p.len(),
            graph: g.num_vertices(),
        });
    }
    Ok(())
}

/// vol_w(c) for every community, indexed by community id.
pub fn community_volumes(g: &Graph, p: &Partition) -> Result<Vec<f64>> {
    check_cover(g, p)?;
    let mut vol = vec![0.0; p.num_communities()];
    for (&c, &d) in p.assignment().iter().zip(g.weighted_degrees()) {
        vol[c as usize] += d;
    }
    Ok(vol)
}

/// cut_w(c) for every community.
pub fn community_cuts(g: &Graph, p: &Partition) -> Result<Vec<f64>> {
    check_cover(g, p)?;
    let labels = p.assignment();
    let mut cut = vec![0.0; p.num_communities()];
    for v in 0..g.num_vertices() {
        let c = labels[v];
        for (u, w) in g.neighbors(v) {
            if labels[u as usize] != c {
                cut[c as usize] += w;
            }
        }
    }
    Ok(cut)
}

pub fn modularity(g: &Graph, p: &Partition) -> Result<f64> {
    let vol = community_volumes(g, p)?;
    let cut = community_cuts(g, p)?;
    let total = g.total_volume();
    if total <= 0.0 {
        return Err(Error::ZeroVolume);
    }
    Ok(vol
        .iter()
        .zip(&cut)
        .map(|(&v, &c)| (v - c) / total - (v * v) / (total * total))
        .sum())
}

/// Weight of `v`'s edges into each adjacent community, `v` itself excluded.
///
/// The entry for `v`'s own community is `cut_w(v, A-)`; loops are skipped.
pub fn cut_between(g: &Graph, p: &Partition, v: VertexId) -> Result<BTreeMap<CommunityId, f64>> {
    check_cover(g, p)?;
    let mut out = BTreeMap::new();
    for (u, w) in g.neighbors_of(v)? {
        if u != v {
            *out.entry(p.assignment()[u as usize]).or_insert(0.0) += w;
        }
    }
    Ok(out)
}

/// `V * (cut_target - cut_current) - deg * (vol_target - vol_current)`, i.e.
/// the move gain scaled by `V^2 / 2`.
///
/// Volumes exclude the moving vertex. For integer weights every term is an
/// exact integer in `f64`, so the sign of this score is exact; callers that
/// only compare gains use it instead of the divided form.
#[inline]
pub fn move_gain_score(
    cut_target: f64,
    cut_current: f64,
    degree: f64,
    vol_target: f64,
    vol_current: f64,
    total_volume: f64,
) -> f64 {
    (cut_target - cut_current) * total_volume - degree * (vol_target - vol_current)
}

/// Modularity change from moving `v` into community `target`.
///
/// `vol_com[c]` must be vol_w(c) under `p`, counting `v` in its current
/// community (as returned by [`community_volumes`]).
pub fn delta_q(
    g: &Graph,
    p: &Partition,
    v: VertexId,
    target: CommunityId,
    vol_com: &[f64],
) -> Result<f64> {
    let k = p.num_communities();
    if target as usize >= k {
        return Err(Error::CommunityOutOfRange {
            community: target,
            k,
        });
    }
    if vol_com.len() != k {
        return Err(Error::SizeMismatch {
            partition: vol_com.len(),
            graph: k,
        });
    }
    let total = g.total_volume();
    if total <= 0.0 {
        return Err(Error::ZeroVolume);
    }
    let current = p.community_of(v)?;
    if current == target {
        return Ok(0.0);
    }
    let cuts = cut_between(g, p, v)?;
    let degree = g.degree_w(v)?;
    let cut_target = cuts.get(&target).copied().unwrap_or(0.0);
    let cut_current = cuts.get(&current).copied().unwrap_or(0.0);
    let vol_target = vol_com[target as usize];
    let vol_current = vol_com[current as usize] - degree;
    Ok(2.0
        * ((cut_target - cut_current) / total
            - degree * (vol_target - vol_current) / (total * total)))
}

/// Exhaustive modularity maximization over all set partitions.
///
/// Partitions are visited as restricted growth strings; the first maximum
/// found wins.
pub fn brute_force_best_partition(g: &Graph) -> Result<(Partition, f64)> {
    let n = g.num_vertices();
    if n > MAX_ENUMERATION_VERTICES {
        return Err(Error::TooLargeForEnumeration {
            n,
            max: MAX_ENUMERATION_VERTICES,
        });
    }
    let total = g.total_volume();
    if total <= 0.0 {
        return Err(Error::ZeroVolume);
    }
    let edges: Vec<_> = g.edges().filter(|&(u, v, _)| u != v).collect();
    let degrees = g.weighted_degrees();

    // Restricted growth string: rgs[0] = 0, rgs[i] <= 1 + max(rgs[..i]).
    let mut rgs = vec![0usize; n];
    let mut best_rgs = rgs.clone();
    let mut best = f64::NEG_INFINITY;
    let mut vol = vec![0.0; n];
    let mut cut = vec![0.0; n];
    loop {
        vol.iter_mut().for_each(|x| *x = 0.0);
        cut.iter_mut().for_each(|x| *x = 0.0);
        for (v, &c) in rgs.iter().enumerate() {
            vol[c] += degrees[v];
        }
        for &(u, v, w) in &edges {
            let (cu, cv) = (rgs[u as usize], rgs[v as usize]);
            if cu != cv {
                cut[cu] += w;
                cut[cv] += w;
            }
        }
        let q: f64 = vol
            .iter()
            .zip(&cut)
            .map(|(&v, &c)| (v - c) / total - (v * v) / (total * total))
            .sum();
        if q > best {
            best = q;
            best_rgs.copy_from_slice(&rgs);
        }
        if !next_rgs(&mut rgs) {
            break;
        }
    }
    let p = Partition::from_labels(best_rgs.iter().map(|&c| c as CommunityId));
    let q = modularity(g, &p)?;
    Ok((p, q))
}

fn next_rgs(rgs: &mut [usize]) -> bool {
    let n = rgs.len();
    for i in (1..n).rev() {
        let max_prefix = rgs[..i].iter().copied().max().unwrap_or(0);
        if rgs[i] <= max_prefix {
            rgs[i] += 1;
            rgs[i + 1..].iter_mut().for_each(|x| *x = 0);
            return true;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{barbell, clique, disjoint_union};

    fn halves() -> Partition {
        Partition::from_labels([0, 0, 0, 1, 1, 1])
    }

    #[test]
    fn single_community_is_zero() {
        let g = barbell();
        assert_close!(
            modularity(&g, &Partition::single_community(6)).unwrap(),
            0.0,
            1e-15
        );
        let k3 = clique(3);
        assert_close!(
            modularity(&k3, &Partition::single_community(3)).unwrap(),
            0.0,
            1e-15
        );
    }

    #[test]
    fn barbell_halves() {
        let q = modularity(&barbell(), &halves()).unwrap();
        assert_close!(q, 2.0 * (6.0 / 14.0 - 49.0 / 196.0), 1e-15);
        assert_close!(q, 0.357_142_857_142_857, 1e-12);
    }

    #[test]
    fn zero_volume_is_an_error() {
        let g = Graph::empty(3).unwrap();
        assert!(matches!(
            modularity(&g, &Partition::singletons(3)),
            Err(Error::ZeroVolume)
        ));
        assert!(matches!(
            modularity(&barbell(), &Partition::singletons(5)),
            Err(Error::SizeMismatch { .. })
        ));
    }

    #[test]
    fn delta_q_same_community_is_zero() {
        let g = barbell();
        let p = halves();
        let vol = community_volumes(&g, &p).unwrap();
        assert_eq!(delta_q(&g, &p, 2, 0, &vol).unwrap(), 0.0);
    }

    #[test]
    fn delta_q_barbell_bridge_move() {
        let g = barbell();
        let p = halves();
        let vol = community_volumes(&g, &p).unwrap();
        let dq = delta_q(&g, &p, 2, 1, &vol).unwrap();
        // Recomputed independently: Q(moved) - Q(halves).
        let moved = Partition::from_labels([0, 0, 1, 1, 1, 1]);
        let expected = modularity(&g, &moved).unwrap() - modularity(&g, &p).unwrap();
        assert_close!(dq, expected, 1e-12);
        assert_close!(dq, -0.234_693_877_551_020_4, 1e-12);
        assert_close!(
            modularity(&g, &moved).unwrap(),
            0.122_448_979_591_836_7,
            1e-12
        );
    }

    #[test]
    fn delta_q_into_singleton() {
        let g = barbell();
        let p = Partition::singletons(6);
        let vol = community_volumes(&g, &p).unwrap();
        let dq = delta_q(&g, &p, 3, 2, &vol).unwrap();
        assert_close!(dq, 2.0 * (1.0 / 14.0 - 3.0 * 3.0 / 196.0), 1e-15);
        assert_close!(dq, 0.051_020_408_163_265_3, 1e-12);
    }

    #[test]
    fn delta_q_rejects_bad_target() {
        let g = barbell();
        let p = halves();
        let vol = community_volumes(&g, &p).unwrap();
        assert!(matches!(
            delta_q(&g, &p, 0, 2, &vol),
            Err(Error::CommunityOutOfRange { community: 2, k: 2 })
        ));
    }

    #[test]
    fn cut_between_cases() {
        let g = barbell();
        let cuts = cut_between(&g, &halves(), 2).unwrap();
        assert_eq!(
            cuts.into_iter().collect::<Vec<_>>(),
            vec![(0, 2.0), (1, 1.0)]
        );

        let iso = Graph::build(3, &[(0, 1, 1.0)]).unwrap();
        assert!(cut_between(&iso, &Partition::singletons(3), 2)
            .unwrap()
            .is_empty());

        let looped = Graph::build(1, &[(0, 0, 2.0)]).unwrap();
        assert!(cut_between(&looped, &Partition::singletons(1), 0)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn brute_force_small_graphs() {
        let (p, q) = brute_force_best_partition(&clique(3)).unwrap();
        assert_eq!(p.num_communities(), 1);
        assert_close!(q, 0.0, 1e-15);

        let two = disjoint_union(&clique(3), &clique(3));
        let (p, q) = brute_force_best_partition(&two).unwrap();
        assert_eq!(p.assignment(), &[0, 0, 0, 1, 1, 1]);
        assert_close!(q, 0.5, 1e-15);

        let (p, q) = brute_force_best_partition(&barbell()).unwrap();
        assert_eq!(p, halves());
        assert_close!(q, 0.357_142_857, 1e-9);
    }

    #[test]
    fn brute_force_refuses_large() {
        let g = Graph::empty(13).unwrap();
        assert!(matches!(
            brute_force_best_partition(&g),
            Err(Error::TooLargeForEnumeration { n: 13, .. })
        ));
    }

    #[test]
    fn rgs_counts_bell_numbers() {
        for (n, bell) in [(1, 1), (3, 5), (4, 15), (6, 203)] {
            let mut rgs = vec![0; n];
            let mut count = 1;
            while next_rgs(&mut rgs) {
                count += 1;
            }
            assert_eq!(count, bell, "Bell({n})");
        }
    }

    #[test]
    fn loops_only_count_in_volume() {
        // One vertex with a loop: vol = 4, no cut; alone it is the whole graph.
        let g = Graph::build(2, &[(0, 0, 2.0), (0, 1, 1.0)]).unwrap();
        let vol = community_volumes(&g, &Partition::singletons(2)).unwrap();
        assert_eq!(vol, vec![5.0, 1.0]);
        let cut = community_cuts(&g, &Partition::singletons(2)).unwrap();
        assert_eq!(cut, vec![1.0, 1.0]);
    }
}
