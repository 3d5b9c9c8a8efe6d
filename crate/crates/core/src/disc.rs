//! The j-uniform hypergraph of discovered (active or explored) j-sets, with
//! maximum i-degree counters for every i < j.
//!
//! Both search phases refuse to query k-sets that would entangle separate
//! discoveries, and both stop once any i-set is contained in too many
//! discovered j-sets. Counters are updated incrementally on insertion, so
//! the threshold check touches only the subsets of the inserted j-set.

use crate::params::{Params, RunConstants};
use crate::util::{pack_subset, CombCursor, FastMap, FastSet};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DiscError {
    #[error("j-set already discovered")]
    Duplicate,
    #[error("search engines support tightness up to 8, got {0}")]
    TightnessTooLarge(u64),
}

/// Why a j-set entered the discovered graph. Per i-subset the tally then
/// splits edge discoveries into jumps (the querying j-set did not contain
/// the i-set) and pivots (it did).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cause {
    NewStart,
    Edge,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CauseTally {
    pub starts: u64,
    pub jumps: u64,
    pub pivots: u64,
}

#[derive(Debug)]
pub struct DiscoveredGraph {
    j: usize,
    members: FastSet<u128>,
    /// degree[i] maps each i-set key to its containment count, i in 1..j.
    degree: Vec<FastMap<u128, u64>>,
    /// Parallel cause tallies, kept only when tracking is on.
    causes: Option<Vec<FastMap<u128, CauseTally>>>,
    /// Largest ratio degree / threshold observed, per i (0 = member count).
    max_seen: Vec<u64>,
}

impl DiscoveredGraph {
    pub fn new(params: &Params, track_causes: bool) -> Result<DiscoveredGraph, DiscError> {
        if params.j > 8 {
            return Err(DiscError::TightnessTooLarge(params.j));
        }
        let j = params.j as usize;
        Ok(DiscoveredGraph {
            j,
            members: Default::default(),
            degree: (1..j).map(|_| FastMap::default()).collect(),
            causes: track_causes.then(|| (1..j).map(|_| FastMap::default()).collect()),
            max_seen: vec![0; j],
        })
    }

    pub fn len(&self) -> u64 {
        self.members.len() as u64
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    #[inline]
    pub fn contains_sorted(&self, sorted: &[u32]) -> bool {
        self.members.contains(&pack_subset(sorted))
    }

    /// Inserts a discovered j-set (sorted vertices), bumping every proper
    /// subset counter. `parent` is the sorted j-set the discovery was made
    /// from, when the cause is an edge. Returns the largest i whose counter
    /// crossed `consts`' threshold, if any.
    pub fn insert_sorted(
        &mut self,
        params: &Params,
        consts: &RunConstants,
        sorted: &[u32],
        cause: Cause,
        parent: Option<&[u32]>,
    ) -> Result<Option<usize>, DiscError> {
        debug_assert_eq!(sorted.len(), self.j);
        if !self.members.insert(pack_subset(sorted)) {
            return Err(DiscError::Duplicate);
        }
        self.max_seen[0] = self.max_seen[0].max(self.members.len() as u64);
        let mut crossed: Option<usize> = None;
        if self.members.len() as u64 >= consts.degree_threshold(params, 0) {
            crossed = Some(0);
        }
        let mut buf = [0u32; 8];
        for i in 1..self.j {
            let threshold = consts.degree_threshold(params, i);
            let mut cursor = CombCursor::new(self.j, i);
            while cursor.next_into(sorted, &mut buf[..i]) {
                let key = pack_subset(&buf[..i]);
                let cnt = self.degree[i - 1].entry(key).or_insert(0);
                *cnt += 1;
                self.max_seen[i] = self.max_seen[i].max(*cnt);
                if *cnt >= threshold {
                    crossed = Some(crossed.map_or(i, |c| c.max(i)));
                }
                if let Some(causes) = &mut self.causes {
                    let tally = causes[i - 1].entry(key).or_default();
                    match cause {
                        Cause::NewStart => tally.starts += 1,
                        Cause::Edge => {
                            // Pivot when the querying j-set already holds
                            // the i-set, jump otherwise.
                            let is_pivot = parent
                                .map(|par| buf[..i].iter().all(|v| par.contains(v)))
                                .unwrap_or(false);
                            if is_pivot {
                                tally.pivots += 1;
                            } else {
                                tally.jumps += 1;
                            }
                        }
                    }
                }
            }
        }
        Ok(crossed)
    }

    /// Maximum i-degree currently recorded (i = 0 gives the member count).
    pub fn max_degree(&self, i: usize) -> u64 {
        self.max_seen[i]
    }

    /// max over i of degree ratio against the stop thresholds.
    pub fn max_threshold_ratio(&self, params: &Params, consts: &RunConstants) -> f64 {
        (0..self.j)
            .map(|i| self.max_seen[i] as f64 / consts.degree_threshold(params, i) as f64)
            .fold(0.0, f64::max)
    }

    pub fn cause_tally(&self, iset_sorted: &[u32]) -> Option<CauseTally> {
        let causes = self.causes.as_ref()?;
        let i = iset_sorted.len();
        if i == 0 || i >= self.j {
            return None;
        }
        Some(
            causes[i - 1]
                .get(&pack_subset(iset_sorted))
                .copied()
                .unwrap_or_default(),
        )
    }

    pub fn degree_of(&self, iset_sorted: &[u32]) -> u64 {
        let i = iset_sorted.len();
        if i == 0 {
            return self.len();
        }
        if i >= self.j {
            return u64::from(self.contains_sorted(iset_sorted));
        }
        self.degree[i - 1]
            .get(&pack_subset(iset_sorted))
            .copied()
            .unwrap_or(0)
    }
}
