//! Lazily revealed random hypergraph.
//!
//! Each k-set's membership is a Bernoulli draw keyed on (seed, k-set, round),
//! so answers are deterministic and independent of query order, and the
//! hypergraph is never materialized. Several rounds with separate
//! probabilities model revealing extra edges later: a query at round r
//! reports whether the k-set succeeded in any round up to r, which keeps the
//! cumulative edge probability at 1 - prod(1 - p_i) <= sum p_i.
//!
//! A replay oracle answers from a fixed edge list instead, for tests and
//! certificate re-verification against explicit instances.

use crate::params::Params;
use crate::util::{mix64, FastMap, FastSet};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum OracleError {
    #[error("round probability {0} outside [0,1]")]
    BadProbability(f64),
    #[error("round index {0} out of range ({1} rounds)")]
    BadRound(usize, usize),
    #[error("k-set must hold {expected} distinct in-range vertices: {reason}")]
    MalformedKSet { expected: u64, reason: String },
    #[error("edge list line {line}: {reason}")]
    BadEdgeLine { line: usize, reason: String },
}

/// Phase labels for instrumentation. A repeated sampling of the same
/// (k-set, round) pair inside one phase indicates an algorithm bug; across
/// phases it is ordinary memo reuse.
pub type Phase = u8;

pub const PHASE_OTHER: Phase = 0;
pub const PHASE_DFS: Phase = 1;
pub const PHASE_FRAY1: Phase = 2;
pub const PHASE_FRAY2: Phase = 3;
pub const PHASE_CLOSER: Phase = 4;
pub const PHASE_CHECK: Phase = 5;

enum Source {
    Seeded { seed: u64 },
    Replay { edges: FastSet<u64> },
}

pub struct EdgeOracle {
    pub n: u64,
    pub k: u64,
    round_probs: Vec<f64>,
    source: Source,
    /// Per-round memo of sampled k-sets (fingerprint -> sampling phase).
    memo: Vec<FastMap<u64, Phase>>,
    memo_hits: Vec<u64>,
    phase_repeats: [u64; 8],
    phase: Phase,
}

#[inline]
fn fingerprint(sorted: &[u32]) -> u64 {
    let mut h = 0x243F_6A88_85A3_08D3u64;
    for &v in sorted {
        h = mix64(h ^ (v as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    }
    h
}

#[inline]
fn draw(seed: u64, round: usize, sorted: &[u32]) -> f64 {
    let mut h = mix64(seed ^ (round as u64 + 1).wrapping_mul(0xA24B_AED4_963E_E407));
    for &v in sorted {
        h = mix64(h ^ (v as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    }
    (h >> 11) as f64 * (1.0 / 9_007_199_254_740_992.0)
}

impl EdgeOracle {
    /// Fresh multi-round oracle over [n] with one Bernoulli probability per
    /// round. A single round gives the classical binomial model; a pair
    /// (p', p'') gives the two-phase reveal.
    pub fn seeded(
        params: &Params,
        round_probs: &[f64],
        seed: u64,
    ) -> Result<EdgeOracle, OracleError> {
        if let Some(&p) = round_probs.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(OracleError::BadProbability(p));
        }
        let rounds = round_probs.len().max(1);
        Ok(EdgeOracle {
            n: params.n,
            k: params.k,
            round_probs: round_probs.to_vec(),
            source: Source::Seeded { seed },
            memo: (0..rounds).map(|_| FastMap::default()).collect(),
            memo_hits: vec![0; rounds],
            phase_repeats: [0; 8],
            phase: PHASE_OTHER,
        })
    }

    /// Deterministic fixed-instance oracle: a k-set is an edge iff listed.
    /// Round structure is kept so callers can use the same query pattern.
    pub fn replay(
        edge_list: &[Vec<u32>],
        n: u64,
        k: u64,
        rounds: usize,
    ) -> Result<EdgeOracle, OracleError> {
        let mut edges = FastSet::default();
        edges.reserve(edge_list.len());
        for e in edge_list {
            let sorted = canonical(e, n, k)?;
            edges.insert(fingerprint(&sorted));
        }
        let rounds = rounds.max(1);
        Ok(EdgeOracle {
            n,
            k,
            round_probs: vec![0.0; rounds],
            source: Source::Replay { edges },
            memo: (0..rounds).map(|_| FastMap::default()).collect(),
            memo_hits: vec![0; rounds],
            phase_repeats: [0; 8],
            phase: PHASE_OTHER,
        })
    }

    pub fn rounds(&self) -> usize {
        self.memo.len()
    }

    pub fn round_probs(&self) -> &[f64] {
        &self.round_probs
    }

    pub fn is_replay(&self) -> bool {
        matches!(self.source, Source::Replay { .. })
    }

    pub fn set_phase(&mut self, phase: Phase) {
        self.phase = phase;
    }

    /// Distinct k-sets sampled in the given round.
    pub fn query_count(&self, round: usize) -> u64 {
        self.memo[round].len() as u64
    }

    /// Query calls that re-hit an already sampled (k-set, round) pair.
    pub fn memo_hit_count(&self, round: usize) -> u64 {
        self.memo_hits[round]
    }

    /// Re-hits whose previous touch happened in the same phase, summed
    /// over every phase.
    pub fn phase_repeat_count(&self) -> u64 {
        self.phase_repeats.iter().sum()
    }

    /// In-phase re-hits for one phase label.
    pub fn phase_repeats_in(&self, phase: Phase) -> u64 {
        self.phase_repeats[phase as usize & 7]
    }

    /// In-phase re-hits across the walk phases only (the closer and checker
    /// revisit memoized k-sets by design).
    pub fn search_phase_repeats(&self) -> u64 {
        self.phase_repeats[PHASE_DFS as usize]
            + self.phase_repeats[PHASE_FRAY1 as usize]
            + self.phase_repeats[PHASE_FRAY2 as usize]
    }

    /// Queries a k-set, revealing rounds lazily: true iff the k-set is an
    /// edge in any round up to `round`.
    pub fn query(&mut self, kset: &[u32], round: usize) -> Result<bool, OracleError> {
        if round >= self.memo.len() {
            return Err(OracleError::BadRound(round, self.memo.len()));
        }
        let sorted = canonical(kset, self.n, self.k)?;
        Ok(self.query_canonical(&sorted, round))
    }

    /// Hot-path variant: `sorted` must be strictly increasing, size k,
    /// within range, and `round` valid.
    #[inline]
    pub fn query_canonical(&mut self, sorted: &[u32], round: usize) -> bool {
        debug_assert!(sorted.len() as u64 == self.k);
        debug_assert!(sorted.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(round < self.memo.len());
        let fp = fingerprint(sorted);
        let mut edge = false;
        for r in 0..=round {
            match self.memo[r].entry(fp) {
                std::collections::hash_map::Entry::Occupied(mut e) => {
                    if r == round {
                        self.memo_hits[round] += 1;
                        if *e.get() == self.phase {
                            self.phase_repeats[self.phase as usize & 7] += 1;
                        }
                        e.insert(self.phase);
                    }
                }
                std::collections::hash_map::Entry::Vacant(v) => {
                    v.insert(self.phase);
                }
            }
            if !edge {
                edge = match &self.source {
                    Source::Seeded { seed } => draw(*seed, r, sorted) < self.round_probs[r],
                    Source::Replay { edges } => edges.contains(&fp),
                };
            }
        }
        edge
    }
}

fn canonical(kset: &[u32], n: u64, k: u64) -> Result<Vec<u32>, OracleError> {
    if kset.len() as u64 != k {
        return Err(OracleError::MalformedKSet {
            expected: k,
            reason: format!("got {} vertices", kset.len()),
        });
    }
    let mut sorted = kset.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(OracleError::MalformedKSet {
            expected: k,
            reason: "repeated vertex".into(),
        });
    }
    if let Some(&v) = sorted.last() {
        if v as u64 >= n {
            return Err(OracleError::MalformedKSet {
                expected: k,
                reason: format!("vertex {v} outside [0, {n})"),
            });
        }
    }
    Ok(sorted)
}

/// Parses the plain-text edge list format: one edge per line, space-separated
/// vertex indices; blank lines and '#' comments are skipped.
pub fn parse_edge_list(text: &str, n: u64, k: u64) -> Result<Vec<Vec<u32>>, OracleError> {
    let mut edges = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut verts = Vec::with_capacity(k as usize);
        for tok in line.split_whitespace() {
            let v: u32 = tok.parse().map_err(|_| OracleError::BadEdgeLine {
                line: idx + 1,
                reason: format!("bad vertex token {tok:?}"),
            })?;
            verts.push(v);
        }
        let sorted = canonical(&verts, n, k).map_err(|e| OracleError::BadEdgeLine {
            line: idx + 1,
            reason: e.to_string(),
        })?;
        edges.push(sorted);
    }
    Ok(edges)
}

/// Renders edges in the same plain-text format.
pub fn format_edge_list(edges: &[Vec<u32>]) -> String {
    let mut out = String::new();
    for e in edges {
        let toks: Vec<String> = e.iter().map(|v| v.to_string()).collect();
        out.push_str(&toks.join(" "));
        out.push('\n');
    }
    out
}
