use crate::error::{Error, Result};
use crate::graph::VertexId;

pub type CommunityId = u32;

/// Disjoint cover of `0..n` with community ids contiguous in `0..k`.
///
/// Ids are normalized by first appearance: vertex 0 is always in community
/// 0, and the next unseen community in vertex order gets the next id.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    assignment: Vec<CommunityId>,
    k: usize,
}

impl Partition {
    /// Every vertex in its own community.
    pub fn singletons(n: usize) -> Partition {
        Partition {
            assignment: (0..n as CommunityId).collect(),
            k: n,
        }
    }

    /// All vertices in one community (no communities when `n == 0`).
    pub fn single_community(n: usize) -> Partition {
        Partition {
            assignment: vec![0; n],
            k: usize::from(n > 0),
        }
    }

    /// Normalizes arbitrary labels into a partition.
    pub fn from_labels<I>(labels: I) -> Partition
    where
        I: IntoIterator<Item = CommunityId>,
    {
        let labels = labels.into_iter();
        let mut remap = std::collections::HashMap::new();
        let mut assignment = Vec::with_capacity(labels.size_hint().0);
        for l in labels {
            let next = remap.len() as CommunityId;
            assignment.push(*remap.entry(l).or_insert(next));
        }
        Partition {
            k: remap.len(),
            assignment,
        }
    }

    /// Normalizes labels that are already known to lie in `0..bound`; avoids
    /// hashing on the hot paths.
    pub fn from_bounded_labels(labels: &[CommunityId], bound: usize) -> Partition {
        let mut remap = vec![CommunityId::MAX; bound];
        let mut k = 0;
        let assignment = labels
            .iter()
            .map(|&l| {
                let slot = &mut remap[l as usize];
                if *slot == CommunityId::MAX {
                    *slot = k;
                    k += 1;
                }
                *slot
            })
            .collect();
        Partition {
            assignment,
            k: k as usize,
        }
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    pub fn num_communities(&self) -> usize {
        self.k
    }

    pub fn assignment(&self) -> &[CommunityId] {
        &self.assignment
    }

    pub fn into_assignment(self) -> Vec<CommunityId> {
        self.assignment
    }

    pub fn community_of(&self, v: VertexId) -> Result<CommunityId> {
        self.assignment
            .get(v as usize)
            .copied()
            .ok_or(Error::VertexOutOfRange {
                vertex: v as u64,
                n: self.len(),
            })
    }

    /// Member lists indexed by community id.
    pub fn communities(&self) -> Vec<Vec<VertexId>> {
        let mut out = vec![Vec::new(); self.k];
        for (v, &c) in self.assignment.iter().enumerate() {
            out[c as usize].push(v as VertexId);
        }
        out
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut out = vec![0; self.k];
        for &c in &self.assignment {
            out[c as usize] += 1;
        }
        out
    }

    /// Composes two levels: `self` maps fine vertices to coarse vertices,
    /// `coarse` partitions the coarse vertices.
    pub fn compose(&self, coarse: &Partition) -> Result<Partition> {
        if coarse.len() != self.k {
            return Err(Error::SizeMismatch {
                partition: coarse.len(),
                graph: self.k,
            });
        }
        Ok(Partition::from_bounded_labels(
            &self
                .assignment
                .iter()
                .map(|&c| coarse.assignment[c as usize])
                .collect::<Vec<_>>(),
            coarse.k,
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalizes_by_first_appearance() {
        let p = Partition::from_labels([7, 7, 3, 9, 3]);
        assert_eq!(p.assignment(), &[0, 0, 1, 2, 1]);
        assert_eq!(p.num_communities(), 3);
        assert_eq!(p, Partition::from_bounded_labels(&[7, 7, 3, 9, 3], 10));
        assert_eq!(p.sizes(), vec![2, 2, 1]);
        assert_eq!(p.communities(), vec![vec![0, 1], vec![2, 4], vec![3]]);
    }

    #[test]
    fn trivial_partitions() {
        assert_eq!(Partition::singletons(3).num_communities(), 3);
        assert_eq!(Partition::single_community(3).num_communities(), 1);
        assert_eq!(Partition::single_community(0).num_communities(), 0);
        assert!(Partition::from_labels([]).is_empty());
    }

    #[test]
    fn compose_levels() {
        let fine = Partition::from_labels([0, 0, 1, 1, 2, 2]);
        let coarse = Partition::from_labels([0, 1, 0]);
        let flat = fine.compose(&coarse).unwrap();
        assert_eq!(flat.assignment(), &[0, 0, 1, 1, 0, 0]);
        assert!(fine.compose(&Partition::singletons(2)).is_err());
    }
}
