//! End j-sets and their extendable partitions.
//!
//! A path is identified with its edge set, so several vertex orderings end
//! in different j-sets. The partition of an end j-set records which block of
//! vertices the next extension may consume: block C_0 holds `a` vertices,
//! every later block holds k-j. When an edge K is found from an end J, one
//! child end arises per a-subset Z of the first rotatable block.

use crate::params::Params;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StructureError {
    #[error("j-set must hold {expected} distinct vertices, got {got}")]
    WrongSize { expected: u64, got: usize },
    #[error("vertices must be strictly increasing")]
    NotCanonical,
    #[error("vertex {0} out of range for n={1}")]
    VertexOutOfRange(u32, u64),
    #[error("partition blocks must cover the j-set exactly")]
    BadPartition,
    #[error("k-set must contain the j-set it extends")]
    KSetMissesJSet,
    #[error("k-set must hold {expected} distinct vertices, got {got}")]
    WrongKSetSize { expected: u64, got: usize },
}

/// A canonical (strictly sorted) set of j vertices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct JSet {
    verts: Vec<u32>,
}

impl JSet {
    pub fn new(params: &Params, verts: Vec<u32>) -> Result<JSet, StructureError> {
        if verts.len() as u64 != params.j {
            return Err(StructureError::WrongSize {
                expected: params.j,
                got: verts.len(),
            });
        }
        if verts.windows(2).any(|w| w[0] >= w[1]) {
            return Err(StructureError::NotCanonical);
        }
        if let Some(&v) = verts.iter().find(|&&v| v as u64 >= params.n) {
            return Err(StructureError::VertexOutOfRange(v, params.n));
        }
        Ok(JSet { verts })
    }

    /// Canonicalizes an unsorted vertex list.
    pub fn from_unsorted(params: &Params, mut verts: Vec<u32>) -> Result<JSet, StructureError> {
        verts.sort_unstable();
        JSet::new(params, verts)
    }

    pub fn vertices(&self) -> &[u32] {
        &self.verts
    }
}

/// Ordered partition (C_0, C_1, ..., C_r) of an end j-set. Blocks mirror the
/// position chunks of the last j vertices of the path ending there, so block
/// order carries real information while the j-set itself is order-free.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtendablePartition {
    /// Flattened blocks: a vertices, then r blocks of k-j vertices each.
    flat: Vec<u32>,
    a: usize,
    stride: usize,
}

impl ExtendablePartition {
    pub fn new(params: &Params, blocks: Vec<Vec<u32>>) -> Result<Self, StructureError> {
        if blocks.len() as u64 != params.r + 1 {
            return Err(StructureError::BadPartition);
        }
        if blocks[0].len() as u64 != params.a {
            return Err(StructureError::BadPartition);
        }
        if blocks[1..]
            .iter()
            .any(|b| b.len() as u64 != params.stride())
        {
            return Err(StructureError::BadPartition);
        }
        let flat: Vec<u32> = blocks.into_iter().flatten().collect();
        let mut sorted = flat.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] >= w[1]) {
            return Err(StructureError::BadPartition);
        }
        Ok(ExtendablePartition {
            flat,
            a: params.a as usize,
            stride: params.stride() as usize,
        })
    }

    /// Partition induced by reading the ordered last-j segment of a path.
    pub fn from_ordered_tail(params: &Params, tail: &[u32]) -> Result<Self, StructureError> {
        if tail.len() as u64 != params.j {
            return Err(StructureError::BadPartition);
        }
        Ok(ExtendablePartition {
            flat: tail.to_vec(),
            a: params.a as usize,
            stride: params.stride() as usize,
        })
    }

    /// The default partition of a fresh start: sorted vertices split into
    /// consecutive blocks.
    pub fn lexicographic(params: &Params, jset: &JSet) -> Self {
        ExtendablePartition {
            flat: jset.vertices().to_vec(),
            a: params.a as usize,
            stride: params.stride() as usize,
        }
    }

    /// Ordered j vertices, block by block.
    pub fn flattened(&self) -> &[u32] {
        &self.flat
    }

    pub fn block(&self, i: usize) -> &[u32] {
        if i == 0 {
            &self.flat[..self.a]
        } else {
            let start = self.a + (i - 1) * self.stride;
            &self.flat[start..start + self.stride]
        }
    }

    pub fn block_count(&self) -> usize {
        1 + (self.flat.len() - self.a) / self.stride
    }

    pub fn jset(&self, params: &Params) -> JSet {
        JSet::from_unsorted(params, self.flat.clone()).expect("partition holds a valid j-set")
    }
}

/// One child end produced by discovering an edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChildEnd {
    pub jset: JSet,
    pub partition: ExtendablePartition,
    /// The reordered last-k segment of the extended vertex sequence. The
    /// parent sequence minus its last j vertices, followed by this tail,
    /// is the child's full sequence.
    pub tail: Vec<u32>,
}

/// Enumerates the child ends reachable when edge `kset` is discovered from
/// the end with the given partition. Returns exactly C(k-j, a) children,
/// one per a-subset Z of the rotatable block.
pub fn child_jsets(
    params: &Params,
    part: &ExtendablePartition,
    kset: &[u32],
) -> Result<Vec<ChildEnd>, StructureError> {
    if kset.len() as u64 != params.k {
        return Err(StructureError::WrongKSetSize {
            expected: params.k,
            got: kset.len(),
        });
    }
    let jverts = part.flattened();
    if jverts.iter().any(|v| !kset.contains(v)) {
        return Err(StructureError::KSetMissesJSet);
    }
    let mut fresh: Vec<u32> = kset
        .iter()
        .copied()
        .filter(|v| !jverts.contains(v))
        .collect();
    fresh.sort_unstable();
    if fresh.len() as u64 != params.stride() {
        return Err(StructureError::WrongKSetSize {
            expected: params.k,
            got: kset.len(),
        });
    }

    // Block the a-subsets rotate out of: C_1 when it exists, otherwise the
    // fresh vertices themselves (j <= k-j means the whole j-set is consumed).
    let rotatable: Vec<u32> = if params.r >= 1 {
        part.block(1).to_vec()
    } else {
        fresh.clone()
    };

    let mut out = Vec::with_capacity(params.batch_size() as usize);
    let mut cursor = crate::util::CombCursor::new(rotatable.len(), params.a as usize);
    let mut z = vec![0u32; params.a as usize];
    while cursor.next_into(&rotatable, &mut z) {
        let mut tail: Vec<u32> = Vec::with_capacity(params.k as usize);
        let mut child_flat: Vec<u32> = Vec::with_capacity(params.j as usize);
        if params.r >= 1 {
            // Tail: C_0, C_1 \ Z, Z, C_2, ..., C_r, fresh.
            tail.extend_from_slice(part.block(0));
            tail.extend(part.block(1).iter().copied().filter(|v| !z.contains(v)));
            tail.extend_from_slice(&z);
            for i in 2..part.block_count() {
                tail.extend_from_slice(part.block(i));
            }
            tail.extend_from_slice(&fresh);
            // Child end: Z, C_2, ..., C_r, fresh.
            child_flat.extend_from_slice(&z);
            for i in 2..part.block_count() {
                child_flat.extend_from_slice(part.block(i));
            }
            child_flat.extend_from_slice(&fresh);
        } else {
            // Tail: the untouched old end, fresh \ Z, Z.
            tail.extend_from_slice(jverts);
            tail.extend(fresh.iter().copied().filter(|v| !z.contains(v)));
            tail.extend_from_slice(&z);
            child_flat.extend_from_slice(&z);
        }
        let jset = JSet::from_unsorted(params, child_flat.clone())?;
        let partition = ExtendablePartition::from_ordered_tail(params, &child_flat)?;
        out.push(ChildEnd { jset, partition, tail });
    }
    debug_assert_eq!(out.len() as u64, params.batch_size());
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(n: u64, k: u64, j: u64) -> Params {
        Params::derive(n, k, j).unwrap()
    }

    #[test]
    fn jset_canonical_only() {
        let p = params(20, 3, 2);
        assert!(JSet::new(&p, vec![1, 2]).is_ok());
        assert!(JSet::new(&p, vec![2, 1]).is_err());
        assert!(JSet::new(&p, vec![2, 2]).is_err());
        assert!(JSet::new(&p, vec![2]).is_err());
        assert!(JSet::new(&p, vec![2, 25]).is_err());
        assert_eq!(
            JSet::from_unsorted(&p, vec![5, 3]).unwrap().vertices(),
            &[3, 5]
        );
    }

    #[test]
    fn seven_four_children_match_hand_enumeration() {
        // End {10,11,12,13} split ({10}, {11,12,13}); edge {10..16} spawns
        // {i,14,15,16} for i in {11,12,13}.
        let p = params(40, 7, 4);
        let part = ExtendablePartition::new(&p, vec![vec![10], vec![11, 12, 13]]).unwrap();
        let kset: Vec<u32> = (10..17).collect();
        let kids = child_jsets(&p, &part, &kset).unwrap();
        assert_eq!(kids.len(), 3);
        let ends: Vec<Vec<u32>> = kids.iter().map(|c| c.jset.vertices().to_vec()).collect();
        assert!(ends.contains(&vec![11, 14, 15, 16]));
        assert!(ends.contains(&vec![12, 14, 15, 16]));
        assert!(ends.contains(&vec![13, 14, 15, 16]));
        for kid in &kids {
            assert_eq!(kid.partition.block(0), &kid.jset.vertices()[..1]);
            assert_eq!(kid.partition.block(1), &[14, 15, 16]);
            assert_eq!(kid.tail.len(), 7);
        }
    }

    #[test]
    fn three_two_single_child() {
        let p = params(20, 3, 2);
        let part = ExtendablePartition::new(&p, vec![vec![4], vec![7]]).unwrap();
        let kids = child_jsets(&p, &part, &[4, 7, 9]).unwrap();
        assert_eq!(kids.len(), 1);
        assert_eq!(kids[0].jset.vertices(), &[7, 9]);
        assert_eq!(kids[0].partition.block(0), &[7]);
        assert_eq!(kids[0].partition.block(1), &[9]);
    }

    #[test]
    fn four_two_child_is_fresh_pair() {
        let p = params(20, 4, 2);
        let part = ExtendablePartition::new(&p, vec![vec![1, 2]]).unwrap();
        let kids = child_jsets(&p, &part, &[1, 2, 5, 9]).unwrap();
        assert_eq!(kids.len(), 1);
        assert_eq!(kids[0].jset.vertices(), &[5, 9]);
        assert_eq!(kids[0].partition.flattened(), &[5, 9]);
    }

    #[test]
    fn child_rejects_kset_missing_jset() {
        let p = params(20, 3, 2);
        let part = ExtendablePartition::new(&p, vec![vec![4], vec![7]]).unwrap();
        assert_eq!(
            child_jsets(&p, &part, &[4, 8, 9]).unwrap_err(),
            StructureError::KSetMissesJSet
        );
    }

    #[test]
    fn batch_size_matches_child_count() {
        for (k, j) in [(3, 2), (4, 2), (5, 2), (5, 3), (6, 4), (7, 4), (7, 5)] {
            let p = params(60, k, j);
            let jset = JSet::new(&p, (0..j as u32).collect()).unwrap();
            let part = ExtendablePartition::lexicographic(&p, &jset);
            let kset: Vec<u32> = (0..j as u32).chain(20..20 + (k - j) as u32).collect();
            let kids = child_jsets(&p, &part, &kset).unwrap();
            assert_eq!(kids.len() as u64, p.batch_size(), "({k},{j})");
            // Children are pairwise distinct ends.
            let mut ends: Vec<_> = kids.iter().map(|c| c.jset.clone()).collect();
            ends.sort();
            ends.dedup();
            assert_eq!(ends.len(), kids.len());
        }
    }

    mod props {
        use super::*;
        use crate::path::{validate_path, TightPath};
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(128))]

            // Extending any end by any child of any eligible k-set yields a
            // valid path whose last window is that k-set, across shapes.
            #[test]
            fn extension_preserves_validity(
                shape in proptest::sample::select(
                    vec![(3u64, 2u64), (4, 2), (5, 2), (5, 3), (6, 4), (7, 4), (7, 5)]
                ),
                steps in 1usize..4,
                seed in any::<u64>(),
            ) {
                let (k, j) = shape;
                let p = Params::derive(200, k, j).unwrap();
                let mut rng = crate::util::SplitMix64::new(seed);
                let start: Vec<u32> = (0..j as u32).collect();
                let mut path = TightPath::trivial(&p, &JSet::new(&p, start).unwrap());
                let mut free: Vec<u32> = (j as u32..200).collect();
                for _ in 0..steps {
                    let part = path.end_partition(&p);
                    // Fresh vertices drawn at random from the untouched pool.
                    let mut fresh = Vec::new();
                    while (fresh.len() as u64) < p.stride() {
                        let i = rng.below(free.len() as u64) as usize;
                        fresh.push(free.swap_remove(i));
                    }
                    let kset: Vec<u32> = part
                        .flattened()
                        .iter()
                        .copied()
                        .chain(fresh.iter().copied())
                        .collect();
                    let kids = child_jsets(&p, &part, &kset).unwrap();
                    prop_assert_eq!(kids.len() as u64, p.batch_size());
                    let pick = rng.below(kids.len() as u64) as usize;
                    let next = path.extend(&p, &kids[pick]).unwrap();
                    prop_assert_eq!(next.end_jset(&p), kids[pick].jset.clone());
                    let edges = next.edges(&p);
                    let mut sorted_k = kset.clone();
                    sorted_k.sort_unstable();
                    prop_assert!(edges.contains(&sorted_k));
                    prop_assert!(validate_path(&p, next.vertices(), |e| edges
                        .contains(&e.to_vec())));
                    path = next;
                }
            }
        }
    }

    #[test]
    fn partition_validation() {
        let p = params(20, 7, 4);
        assert!(ExtendablePartition::new(&p, vec![vec![1], vec![2, 3, 4]]).is_ok());
        assert!(ExtendablePartition::new(&p, vec![vec![1, 2], vec![3, 4, 5]]).is_err());
        assert!(ExtendablePartition::new(&p, vec![vec![1], vec![2, 3]]).is_err());
        assert!(ExtendablePartition::new(&p, vec![vec![1], vec![2, 3, 1]]).is_err());
    }
}
