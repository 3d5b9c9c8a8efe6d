//! Tight paths and cycles as vertex sequences with stride-(k-j) windows.

use crate::params::Params;
use crate::structure::{ChildEnd, ExtendablePartition, JSet, StructureError};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PathError {
    #[error("sequence of {got} vertices cannot form a path: expected j + l*(k-j)")]
    BadLength { got: usize },
    #[error("vertices must be pairwise distinct")]
    RepeatedVertex,
    #[error("vertex {0} out of range for n={1}")]
    VertexOutOfRange(u32, u64),
    #[error("cycle of {got} vertices is degenerate: needs (k-j)*l >= k and l >= 1")]
    DegenerateCycle { got: usize },
    #[error("cycle windows are not pairwise distinct")]
    RepeatedWindow,
    #[error(transparent)]
    Structure(#[from] StructureError),
}

/// A j-tight path: distinct vertices x_1..x_{j+(k-j)l} whose every window of
/// k consecutive vertices at stride k-j is an edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TightPath {
    verts: Vec<u32>,
    len: u64,
}

impl TightPath {
    pub fn new(params: &Params, verts: Vec<u32>) -> Result<TightPath, PathError> {
        let v = verts.len() as u64;
        if v < params.j || !(v - params.j).is_multiple_of(params.stride()) {
            return Err(PathError::BadLength { got: verts.len() });
        }
        check_distinct(&verts)?;
        if let Some(&x) = verts.iter().find(|&&x| x as u64 >= params.n) {
            return Err(PathError::VertexOutOfRange(x, params.n));
        }
        let len = (v - params.j) / params.stride();
        Ok(TightPath { verts, len })
    }

    /// The trivial path on a single j-set.
    pub fn trivial(_params: &Params, jset: &JSet) -> TightPath {
        TightPath {
            verts: jset.vertices().to_vec(),
            len: 0,
        }
    }

    pub fn length(&self) -> u64 {
        self.len
    }

    pub fn vertices(&self) -> &[u32] {
        &self.verts
    }

    /// Window i (0-based), a slice of k consecutive vertices.
    pub fn window(&self, params: &Params, i: u64) -> &[u32] {
        let start = (params.stride() * i) as usize;
        &self.verts[start..start + params.k as usize]
    }

    /// All windows in order, each returned as a sorted k-set.
    pub fn edges(&self, params: &Params) -> Vec<Vec<u32>> {
        (0..self.len)
            .map(|i| {
                let mut w = self.window(params, i).to_vec();
                w.sort_unstable();
                w
            })
            .collect()
    }

    /// The ordered last-j segment, and the end j-set it spells.
    pub fn end_tail(&self, params: &Params) -> &[u32] {
        &self.verts[self.verts.len() - params.j as usize..]
    }

    pub fn end_jset(&self, params: &Params) -> JSet {
        JSet::from_unsorted(params, self.end_tail(params).to_vec()).expect("path end is a j-set")
    }

    /// The j-set at the sequence start (the other extendable end).
    pub fn start_jset(&self, params: &Params) -> JSet {
        JSet::from_unsorted(params, self.verts[..params.j as usize].to_vec())
            .expect("path start is a j-set")
    }

    pub fn end_partition(&self, params: &Params) -> ExtendablePartition {
        ExtendablePartition::from_ordered_tail(params, self.end_tail(params))
            .expect("path end induces a partition")
    }

    /// Extends by one discovered edge, rearranging the old end according to
    /// the chosen child. The child must come from `child_jsets` on this
    /// path's end partition.
    pub fn extend(&self, params: &Params, child: &ChildEnd) -> Result<TightPath, PathError> {
        let keep = self.verts.len() - params.j as usize;
        let mut verts = Vec::with_capacity(keep + params.k as usize);
        verts.extend_from_slice(&self.verts[..keep]);
        verts.extend_from_slice(&child.tail);
        TightPath::new(params, verts)
    }

    /// The same path traversed backwards (still a path, same edges).
    pub fn reversed(&self) -> TightPath {
        TightPath {
            verts: self.verts.iter().rev().copied().collect(),
            len: self.len,
        }
    }

    /// Drops `count` edges from the sequence end.
    pub fn truncate_end(&self, params: &Params, count: u64) -> TightPath {
        assert!(count <= self.len);
        let keep = self.verts.len() - (count * params.stride()) as usize;
        TightPath {
            verts: self.verts[..keep].to_vec(),
            len: self.len - count,
        }
    }
}

/// A j-tight cycle: (k-j)*l distinct vertices whose l cyclic stride windows
/// are all edges. Wrap-around identifies the first j vertices with the ones
/// past the end. Lengths with (k-j)*l < k or coinciding windows are rejected
/// so a single edge cannot masquerade as a cycle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TightCycle {
    verts: Vec<u32>,
    len: u64,
}

impl TightCycle {
    pub fn new(params: &Params, verts: Vec<u32>) -> Result<TightCycle, PathError> {
        let v = verts.len() as u64;
        if v == 0 || !v.is_multiple_of(params.stride()) || v < params.k {
            return Err(PathError::DegenerateCycle { got: verts.len() });
        }
        check_distinct(&verts)?;
        if let Some(&x) = verts.iter().find(|&&x| x as u64 >= params.n) {
            return Err(PathError::VertexOutOfRange(x, params.n));
        }
        let len = v / params.stride();
        let cy = TightCycle { verts, len };
        let mut edges = cy.edges(params);
        edges.sort();
        let before = edges.len();
        edges.dedup();
        if edges.len() != before {
            return Err(PathError::RepeatedWindow);
        }
        Ok(cy)
    }

    pub fn length(&self) -> u64 {
        self.len
    }

    pub fn vertices(&self) -> &[u32] {
        &self.verts
    }

    /// Cyclic window i as a sorted k-set.
    pub fn edge(&self, params: &Params, i: u64) -> Vec<u32> {
        let n = self.verts.len();
        let start = (params.stride() * i) as usize;
        let mut w: Vec<u32> = (0..params.k as usize)
            .map(|o| self.verts[(start + o) % n])
            .collect();
        w.sort_unstable();
        w
    }

    pub fn edges(&self, params: &Params) -> Vec<Vec<u32>> {
        (0..self.len).map(|i| self.edge(params, i)).collect()
    }
}

fn check_distinct(verts: &[u32]) -> Result<(), PathError> {
    let mut sorted = verts.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(PathError::RepeatedVertex);
    }
    Ok(())
}

/// True iff the sequence satisfies every path invariant and each window
/// passes the edge test. Pure: the edge test receives sorted k-sets.
pub fn validate_path(
    params: &Params,
    verts: &[u32],
    mut edge_test: impl FnMut(&[u32]) -> bool,
) -> bool {
    let path = match TightPath::new(params, verts.to_vec()) {
        Ok(p) => p,
        Err(_) => return false,
    };
    path.edges(params).iter().all(|e| edge_test(e))
}

/// Cyclic counterpart of `validate_path`, including the degeneracy rule.
pub fn validate_cycle(
    params: &Params,
    verts: &[u32],
    mut edge_test: impl FnMut(&[u32]) -> bool,
) -> bool {
    let cy = match TightCycle::new(params, verts.to_vec()) {
        Ok(c) => c,
        Err(_) => return false,
    };
    cy.edges(params).iter().all(|e| edge_test(e))
}
