//! Depth-first growth of a single long tight path.
//!
//! Queries always issue from the most recently activated end. Each found
//! edge activates a batch of C(k-j, a) child ends that share the extended
//! path; when an end exhausts its eligible k-sets it is popped and its
//! predecessor resumes. A k-set is eligible from end J only if its fresh
//! vertices avoid J's path and it contains no other discovered j-set, which
//! guarantees no k-set is ever queried twice.

use crate::disc::{Cause, DiscoveredGraph};
use crate::oracle::EdgeOracle;
use crate::params::{ParamError, Params, RunConstants};
use crate::path::TightPath;
use crate::structure::{child_jsets, ExtendablePartition, JSet};
use crate::util::{binom_u128, CombCursor, SplitMix64, VertexMask};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SearchError {
    #[error(transparent)]
    Params(#[from] ParamError),
    #[error("search engines need n < 65535, got {0}")]
    VertexRangeTooLarge(u64),
    #[error("{0}")]
    Internal(String),
}

/// Which stopping condition ended the walk.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DfsStop {
    /// A path reached the length target.
    LengthReached,
    /// The query budget ran out.
    QueryBudget,
    /// Some i-set's degree in the discovered graph crossed its threshold.
    DegreeThreshold(usize),
    /// Every j-set became explored.
    Exhausted,
}

#[derive(Debug, Clone, Copy)]
pub struct HeadRecord {
    /// Path length when this end was activated.
    pub activation_len: u64,
    /// Edges found over its whole enumeration (it was fully explored).
    pub children_edges: u64,
    /// Eligible k-sets it actually queried.
    pub queried: u64,
}

#[derive(Debug, Clone, Copy)]
pub struct TraceRow {
    pub t: u64,
    pub len: u64,
    pub discovered: u64,
    pub max_degree_ratio: f64,
}

#[derive(Debug, Clone)]
pub struct PathfinderOpts {
    /// Oracle round the walk draws from.
    pub round: usize,
    /// Stop as soon as a path reaches this length.
    pub length_target: u64,
    /// Stop after this many queries.
    pub query_budget: u64,
    /// First activation; a uniformly random neutral j-set when absent.
    pub start: Option<(JSet, ExtendablePartition)>,
    /// Seed for new-start sampling.
    pub seed: u64,
    /// Keep per-explored-head records (activation length, children).
    pub record_heads: bool,
    /// Keep per-batch trace rows.
    pub record_trace: bool,
    /// Track degree causes (new start / jump / pivot tallies).
    pub track_causes: bool,
    /// After stopping, finish enumerating the ends still on the stack
    /// (measurement only: found edges are counted, not activated), so head
    /// records carry unconditional child counts.
    pub complete_heads_on_stop: bool,
}

impl PathfinderOpts {
    /// Standalone defaults: length target (1 - delta/3) * L1, query budget
    /// eps^2 * n^k.
    pub fn standard(params: &Params, consts: &RunConstants, seed: u64) -> PathfinderOpts {
        PathfinderOpts {
            round: 0,
            length_target: consts.dfs_length_target(params),
            query_budget: consts.dfs_query_cap(params),
            start: None,
            seed,
            record_heads: false,
            record_trace: false,
            track_causes: false,
            complete_heads_on_stop: false,
        }
    }
}

#[derive(Debug)]
pub struct DfsOutcome {
    /// Longest path the walk constructed.
    pub path: TightPath,
    pub stop: DfsStop,
    /// Queries issued.
    pub queries: u64,
    pub new_starts: u64,
    pub discovered: u64,
    /// Edges whose activation produced other than C(k-j, a) children.
    pub batch_violations: u64,
    pub max_degree_ratio: f64,
    pub head_records: Vec<HeadRecord>,
    pub trace: Vec<TraceRow>,
    /// Final discovered graph, with cause tallies when tracking was on.
    pub disc: DiscoveredGraph,
}

struct Node {
    parent: Option<u32>,
    /// Root: the seed j-set in order. Child: the reordered last-k segment.
    tail: Vec<u32>,
    len: u64,
}

struct Frame {
    node: u32,
    jset_sorted: Vec<u32>,
    /// Complement of the path vertices at activation; fixed per frame.
    pool: Option<Vec<u32>>,
    cursor: CombCursor,
    activation_len: u64,
    children_edges: u64,
    queried: u64,
}

struct Arena {
    nodes: Vec<Node>,
    j: usize,
    stride: usize,
}

impl Arena {
    fn materialize(&self, idx: u32) -> Vec<u32> {
        let mut chain = Vec::new();
        let mut cur = Some(idx);
        while let Some(i) = cur {
            chain.push(i);
            cur = self.nodes[i as usize].parent;
        }
        chain.reverse();
        let mut seq = Vec::with_capacity(self.j + self.stride * (chain.len() - 1) + self.stride);
        for (pos, &i) in chain.iter().enumerate() {
            let tail = &self.nodes[i as usize].tail;
            if pos + 1 == chain.len() {
                seq.extend_from_slice(tail);
            } else if pos == 0 {
                // Root tail is the whole seed; children replace its last j.
                seq.extend_from_slice(&tail[..tail.len() - self.j]);
            } else {
                seq.extend_from_slice(&tail[..self.stride]);
            }
        }
        seq
    }
}

/// Collects the k-sets eligible to be queried from `jset` given the path to
/// it and the currently discovered j-sets, in lexicographic order of the
/// fresh part. The enumeration the walk itself performs is identical but
/// interleaved with discovery.
pub fn eligible_ksets(
    params: &Params,
    disc: &DiscoveredGraph,
    path_vertices: &[u32],
    jset: &JSet,
) -> Vec<Vec<u32>> {
    let mut mask = VertexMask::new(params.n as usize);
    mask.set_all(path_vertices);
    let pool: Vec<u32> = (0..params.n as u32).filter(|&v| !mask.test(v)).collect();
    let mut cursor = CombCursor::new(pool.len(), params.stride() as usize);
    let mut fresh = vec![0u32; params.stride() as usize];
    let mut out = Vec::new();
    while cursor.next_into(&pool, &mut fresh) {
        let k = merge_sorted(jset.vertices(), &fresh);
        if !contains_other_discovered(params, disc, &k, jset.vertices()) {
            out.push(k);
        }
    }
    out
}

#[inline]
fn merge_sorted(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut l) = (0, 0);
    while i < a.len() && l < b.len() {
        if a[i] < b[l] {
            out.push(a[i]);
            i += 1;
        } else {
            out.push(b[l]);
            l += 1;
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[l..]);
    out
}

#[inline]
fn contains_other_discovered(
    params: &Params,
    disc: &DiscoveredGraph,
    kset: &[u32],
    own: &[u32],
) -> bool {
    if disc.len() <= 1 {
        return false;
    }
    let mut cursor = CombCursor::new(kset.len(), params.j as usize);
    let mut sub = vec![0u32; params.j as usize];
    while cursor.next_into(kset, &mut sub) {
        if sub != own && disc.contains_sorted(&sub) {
            return true;
        }
    }
    false
}

/// Runs the depth-first walk until a stopping condition fires.
pub fn run_pathfinder(
    oracle: &mut EdgeOracle,
    params: &Params,
    consts: &RunConstants,
    opts: &PathfinderOpts,
) -> Result<DfsOutcome, SearchError> {
    if params.n >= 0xFFFF {
        return Err(SearchError::VertexRangeTooLarge(params.n));
    }
    consts.check_chain(params)?;
    let j = params.j as usize;
    let stride = params.stride() as usize;
    let batch = params.batch_size();
    let total_jsets: u64 = binom_u128(params.n, params.j)
        .map(|v| v.min(u64::MAX as u128) as u64)
        .unwrap_or(u64::MAX);

    let mut disc = DiscoveredGraph::new(params, opts.track_causes)
        .map_err(|e| SearchError::Internal(e.to_string()))?;
    let mut arena = Arena {
        nodes: Vec::new(),
        j,
        stride,
    };
    let mut stack: Vec<Frame> = Vec::new();
    let mut rng = SplitMix64::derive(opts.seed, 0x5EED_0001);

    let mut queries: u64 = 0;
    let mut new_starts: u64 = 0;
    let mut batch_violations: u64 = 0;
    let mut head_records = Vec::new();
    let mut trace = Vec::new();
    let mut best_node: Option<u32> = None;
    let mut best_len: u64 = 0;
    let mut pending_start = opts.start.clone();
    let mut stop = None;

    'outer: while stop.is_none() {
        // Refill on an empty stack with a fresh neutral j-set.
        if stack.is_empty() {
            if disc.len() >= total_jsets {
                stop = Some(DfsStop::Exhausted);
                break;
            }
            let (jset, partition) = match pending_start.take() {
                Some(s) => s,
                None => match sample_neutral(params, &disc, &mut rng) {
                    Some(js) => {
                        let part = ExtendablePartition::lexicographic(params, &js);
                        (js, part)
                    }
                    None => {
                        stop = Some(DfsStop::Exhausted);
                        break;
                    }
                },
            };
            new_starts += 1;
            let crossed = disc
                .insert_sorted(params, consts, jset.vertices(), Cause::NewStart, None)
                .map_err(|e| SearchError::Internal(e.to_string()))?;
            let node = arena.nodes.len() as u32;
            arena.nodes.push(Node {
                parent: None,
                tail: partition.flattened().to_vec(),
                len: 0,
            });
            if best_node.is_none() {
                best_node = Some(node);
            }
            stack.push(Frame {
                node,
                jset_sorted: jset.vertices().to_vec(),
                pool: None,
                cursor: CombCursor::new(0, 0),
                activation_len: 0,
                children_edges: 0,
                queried: 0,
            });
            if let Some(i) = crossed {
                stop = Some(DfsStop::DegreeThreshold(i));
                break;
            }
            if opts.length_target == 0 {
                stop = Some(DfsStop::LengthReached);
                break;
            }
        }

        let top = stack.len() - 1;
        // Lazily fix the eligible pool the first time this end leads.
        if stack[top].pool.is_none() {
            let verts = arena.materialize(stack[top].node);
            let mut mask = VertexMask::new(params.n as usize);
            mask.set_all(&verts);
            let pool: Vec<u32> = (0..params.n as u32).filter(|&v| !mask.test(v)).collect();
            stack[top].cursor = CombCursor::new(pool.len(), stride);
            stack[top].pool = Some(pool);
        }

        let mut fresh = vec![0u32; stride];
        loop {
            let frame = &mut stack[top];
            let pool = frame.pool.as_ref().unwrap();
            if !frame.cursor.next_into(pool, &mut fresh) {
                // Fully explored: record and pop.
                if opts.record_heads {
                    head_records.push(HeadRecord {
                        activation_len: frame.activation_len,
                        children_edges: frame.children_edges,
                        queried: frame.queried,
                    });
                }
                stack.pop();
                continue 'outer;
            }
            let kset = merge_sorted(&frame.jset_sorted, &fresh);
            if contains_other_discovered(params, &disc, &kset, &frame.jset_sorted) {
                continue;
            }
            queries += 1;
            stack[top].queried += 1;
            let is_edge = oracle.query_canonical(&kset, opts.round);
            if queries >= opts.query_budget && !is_edge {
                stop = Some(DfsStop::QueryBudget);
                break 'outer;
            }
            if !is_edge {
                continue;
            }

            // A batch becomes active.
            stack[top].children_edges += 1;
            let parent_node = stack[top].node;
            let parent_len = arena.nodes[parent_node as usize].len;
            let parent_tail: Vec<u32> = {
                let t = &arena.nodes[parent_node as usize].tail;
                t[t.len() - j..].to_vec()
            };
            let partition = ExtendablePartition::from_ordered_tail(params, &parent_tail)
                .map_err(|e| SearchError::Internal(e.to_string()))?;
            let children = child_jsets(params, &partition, &kset)
                .map_err(|e| SearchError::Internal(e.to_string()))?;
            if children.len() as u64 != batch {
                batch_violations += 1;
            }
            let parent_sorted = stack[top].jset_sorted.clone();
            let mut crossed_at = None;
            for child in &children {
                let crossed = disc
                    .insert_sorted(
                        params,
                        consts,
                        child.jset.vertices(),
                        Cause::Edge,
                        Some(&parent_sorted),
                    )
                    .map_err(|e| SearchError::Internal(e.to_string()))?;
                if let Some(i) = crossed {
                    crossed_at = Some(i);
                }
                let node = arena.nodes.len() as u32;
                arena.nodes.push(Node {
                    parent: Some(parent_node),
                    tail: child.tail.clone(),
                    len: parent_len + 1,
                });
                stack.push(Frame {
                    node,
                    jset_sorted: child.jset.vertices().to_vec(),
                    pool: None,
                    cursor: CombCursor::new(0, 0),
                    activation_len: parent_len + 1,
                    children_edges: 0,
                    queried: 0,
                });
                if parent_len + 1 > best_len {
                    best_len = parent_len + 1;
                    best_node = Some(node);
                }
            }
            if opts.record_trace {
                trace.push(TraceRow {
                    t: queries,
                    len: best_len,
                    discovered: disc.len(),
                    max_degree_ratio: disc.max_threshold_ratio(params, consts),
                });
            }
            if best_len >= opts.length_target {
                stop = Some(DfsStop::LengthReached);
            } else if let Some(i) = crossed_at {
                stop = Some(DfsStop::DegreeThreshold(i));
            } else if queries >= opts.query_budget {
                stop = Some(DfsStop::QueryBudget);
            }
            // Depth-first: continue from the newest activation.
            continue 'outer;
        }
    }

    // Measurement mode: complete the remaining enumerations so the stack's
    // ends also report full-enumeration child counts.
    if opts.complete_heads_on_stop && opts.record_heads {
        let mut fresh = vec![0u32; stride];
        for frame in stack.iter_mut() {
            if frame.pool.is_none() {
                let verts = arena.materialize(frame.node);
                let mut mask = VertexMask::new(params.n as usize);
                mask.set_all(&verts);
                let pool: Vec<u32> =
                    (0..params.n as u32).filter(|&v| !mask.test(v)).collect();
                frame.cursor = CombCursor::new(pool.len(), stride);
                frame.pool = Some(pool);
            }
            loop {
                let pool = frame.pool.as_ref().unwrap();
                if !frame.cursor.next_into(pool, &mut fresh) {
                    break;
                }
                let kset = merge_sorted(&frame.jset_sorted, &fresh);
                if contains_other_discovered(params, &disc, &kset, &frame.jset_sorted) {
                    continue;
                }
                queries += 1;
                frame.queried += 1;
                if oracle.query_canonical(&kset, opts.round) {
                    frame.children_edges += 1;
                }
            }
            head_records.push(HeadRecord {
                activation_len: frame.activation_len,
                children_edges: frame.children_edges,
                queried: frame.queried,
            });
        }
    }

    let best = best_node.ok_or_else(|| SearchError::Internal("no activation".into()))?;
    let path = TightPath::new(params, arena.materialize(best))
        .map_err(|e| SearchError::Internal(format!("constructed path invalid: {e}")))?;
    let max_degree_ratio = disc.max_threshold_ratio(params, consts);
    Ok(DfsOutcome {
        path,
        stop: stop.unwrap(),
        queries,
        new_starts,
        discovered: disc.len(),
        batch_violations,
        max_degree_ratio,
        head_records,
        trace,
        disc,
    })
}

fn sample_neutral(
    params: &Params,
    disc: &DiscoveredGraph,
    rng: &mut SplitMix64,
) -> Option<JSet> {
    let n = params.n as u32;
    let j = params.j as usize;
    let mut verts = vec![0u32; j];
    for _ in 0..64 {
        let mut picked = 0;
        while picked < j {
            let v = rng.below(n as u64) as u32;
            if !verts[..picked].contains(&v) {
                verts[picked] = v;
                picked += 1;
            }
        }
        verts.sort_unstable();
        if !disc.contains_sorted(&verts) {
            return JSet::new(params, verts.clone()).ok();
        }
    }
    // Deterministic sweep once rejection keeps colliding (near exhaustion).
    let pool: Vec<u32> = (0..n).collect();
    let mut cursor = CombCursor::new(pool.len(), j);
    let mut buf = vec![0u32; j];
    while cursor.next_into(&pool, &mut buf) {
        if !disc.contains_sorted(&buf) {
            return JSet::new(params, buf.clone()).ok();
        }
    }
    None
}
