//! Breadth-first fan-out of a long path's ends into a family of augmenting
//! paths.
//!
//! Seeds are the ends obtainable by deleting up to ceil((ln n)^2) terminal
//! edges from one stub of the long path. From the first end in the queue,
//! every eligible k-set is queried once; eligible means its fresh vertices
//! avoid the whole long path, the forbidden set and the end's own
//! extension, and the k-set contains no explored j-set. Found edges enqueue
//! child ends with inherited paths. The walk halts at the first of: queue
//! death, an extension reaching twice the stub allowance, a degree
//! threshold, or the discovery cap — only the last is success.
//!
//! Running the fan-out on both stubs and forbidding overused vertices the
//! second time yields the augmenting family the cycle closer consumes.

use crate::disc::{Cause, DiscoveredGraph};
use crate::oracle::EdgeOracle;
use crate::params::{Params, RunConstants};
use crate::path::TightPath;
use crate::pathfinder::SearchError;
use crate::structure::{child_jsets, ExtendablePartition, JSet};
use crate::util::{CombCursor, VertexMask};
use std::collections::VecDeque;
use thiserror::Error;

/// Stopping condition of one fan-out run; only `DiscoveryCap` feeds the
/// closer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrayStop {
    /// The queue drained: the process died.
    QueueEmpty,
    /// Some extension used up twice the stub allowance.
    LengthCap,
    /// A degree threshold was crossed.
    DegreeThreshold(usize),
    /// The discovered set reached its target size.
    DiscoveryCap,
    /// Engineering cap on queries, outside the four listed conditions.
    QueryBudget,
}

/// One seed end: a j-set on the stub with its ordered tail (which induces
/// the extendable partition) and its offset from the protected core.
#[derive(Debug, Clone)]
pub struct FraySeed {
    pub jset: JSet,
    /// Ordered last-j segment of the path ending at this seed.
    pub tail: Vec<u32>,
    /// Extension length already spent inside the stub: in [1, allowance].
    pub aug_len: u64,
    /// Terminal edges deleted from the stub to reach this seed.
    pub offset: u64,
}

/// A discovered end with everything needed to rebuild its path.
#[derive(Debug, Clone)]
pub struct FrayEnd {
    pub jset: JSet,
    /// Stub offset of the seed this end descends from.
    pub offset: u64,
    /// Extension length from the core end: stub part plus generation.
    pub aug_len: u64,
    pub generation: u64,
    /// Replayed last segment: the seed path minus its last j vertices,
    /// followed by `ext`, is this end's full path sequence.
    pub ext: Vec<u32>,
    /// Fresh vertices the fan-out added, in order.
    pub fresh: Vec<u32>,
}

#[derive(Debug, Clone, Copy)]
pub struct SnapshotRow {
    pub t: u64,
    pub active: u64,
    pub explored: u64,
    pub newest_generation: u64,
}

#[derive(Debug)]
pub struct FrayOutcome {
    pub stop: FrayStop,
    /// Every discovered end (seeds included), in discovery order.
    pub ends: Vec<FrayEnd>,
    pub queries: u64,
    pub batch_violations: u64,
    /// Children skipped because the j-set was already active.
    pub child_collisions: u64,
    /// The stopping condition cut a batch short.
    pub truncated_final_batch: bool,
    pub max_degree_ratio: f64,
    pub snapshots: Vec<SnapshotRow>,
}

#[derive(Debug, Clone)]
pub struct FrayOpts {
    pub round: usize,
    pub query_budget: u64,
    pub record_snapshots: bool,
}

impl Default for FrayOpts {
    fn default() -> Self {
        FrayOpts {
            round: 0,
            query_budget: u64::MAX,
            record_snapshots: false,
        }
    }
}

struct Node {
    parent: Option<u32>,
    /// Root: the seed's ordered last-j. Child: the reordered last-k.
    tail: Vec<u32>,
    seed_idx: u32,
    aug_len: u64,
    generation: u64,
}

/// Runs one breadth-first fan-out. `long_path` is the full path both stubs
/// belong to; its vertices are never re-used by extensions.
pub fn fray(
    oracle: &mut EdgeOracle,
    params: &Params,
    consts: &RunConstants,
    long_path: &TightPath,
    seeds: &[FraySeed],
    forb: &[u32],
    opts: &FrayOpts,
) -> Result<FrayOutcome, SearchError> {
    if params.n >= 0xFFFF {
        return Err(SearchError::VertexRangeTooLarge(params.n));
    }
    consts.check_chain(params)?;
    let stride = params.stride() as usize;
    let j = params.j as usize;
    let batch = params.batch_size();
    let aug_cap = 2 * consts.log_sq(params);
    let disc_cap = consts.bfs_discovery_cap(params);

    let mut base_mask = VertexMask::new(params.n as usize);
    base_mask.set_all(long_path.vertices());
    base_mask.set_all(forb);

    let mut disc = DiscoveredGraph::new(params, false)
        .map_err(|e| SearchError::Internal(e.to_string()))?;
    let mut explored: crate::util::FastSet<u128> = Default::default();
    let mut nodes: Vec<Node> = Vec::new();
    let mut queue: VecDeque<u32> = VecDeque::new();
    let mut order: Vec<u32> = Vec::new();

    // Generation zero, lexicographic activation order.
    let mut sorted_seeds: Vec<&FraySeed> = seeds.iter().collect();
    sorted_seeds.sort_by(|a, b| a.jset.cmp(&b.jset));
    let mut stop = None;
    for (si, seed) in sorted_seeds.iter().enumerate() {
        let crossed = disc
            .insert_sorted(params, consts, seed.jset.vertices(), Cause::NewStart, None)
            .map_err(|e| SearchError::Internal(format!("duplicate seed: {e}")))?;
        let id = nodes.len() as u32;
        nodes.push(Node {
            parent: None,
            tail: seed.tail.clone(),
            seed_idx: si as u32,
            aug_len: seed.aug_len,
            generation: 0,
        });
        queue.push_back(id);
        order.push(id);
        if let Some(i) = crossed {
            stop = Some(FrayStop::DegreeThreshold(i));
            break;
        }
        if disc.len() >= disc_cap {
            stop = Some(FrayStop::DiscoveryCap);
            break;
        }
    }

    let mut queries: u64 = 0;
    let mut batch_violations: u64 = 0;
    let mut child_collisions: u64 = 0;
    let mut truncated = false;
    let mut snapshots = Vec::new();
    let mut fresh_buf = vec![0u32; stride];

    'outer: while stop.is_none() {
        let Some(head) = queue.pop_front() else {
            stop = Some(FrayStop::QueueEmpty);
            break;
        };
        // Mask: the long path, forbidden vertices, own fresh extension.
        let mut mask = base_mask.clone();
        {
            let mut cur = Some(head);
            while let Some(i) = cur {
                let node = &nodes[i as usize];
                if node.parent.is_some() {
                    let t = &node.tail;
                    mask.set_all(&t[t.len() - stride..]);
                }
                cur = node.parent;
            }
        }
        let pool: Vec<u32> = (0..params.n as u32).filter(|&v| !mask.test(v)).collect();
        let head_tail: Vec<u32> = {
            let t = &nodes[head as usize].tail;
            t[t.len() - j..].to_vec()
        };
        let mut head_sorted = head_tail.clone();
        head_sorted.sort_unstable();
        let head_aug = nodes[head as usize].aug_len;
        let head_gen = nodes[head as usize].generation;
        let head_seed = nodes[head as usize].seed_idx;
        let partition = ExtendablePartition::from_ordered_tail(params, &head_tail)
            .map_err(|e| SearchError::Internal(e.to_string()))?;

        let mut cursor = CombCursor::new(pool.len(), stride);
        let mut sub_buf = vec![0u32; j];
        while cursor.next_into(&pool, &mut fresh_buf) {
            let kset = merge_sorted(&head_sorted, &fresh_buf);
            // Skip k-sets containing an explored j-set.
            let mut forbidden = false;
            if !explored.is_empty() {
                let mut sc = CombCursor::new(kset.len(), j);
                while sc.next_into(&kset, &mut sub_buf) {
                    if explored.contains(&crate::util::pack_subset(&sub_buf)) {
                        forbidden = true;
                        break;
                    }
                }
            }
            if forbidden {
                continue;
            }
            queries += 1;
            let is_edge = oracle.query_canonical(&kset, opts.round);
            if queries >= opts.query_budget && !is_edge {
                stop = Some(FrayStop::QueryBudget);
                break 'outer;
            }
            if !is_edge {
                continue;
            }

            let children = child_jsets(params, &partition, &kset)
                .map_err(|e| SearchError::Internal(e.to_string()))?;
            let mut activated = 0u64;
            for child in &children {
                if disc.contains_sorted(child.jset.vertices()) {
                    child_collisions += 1;
                    continue;
                }
                let crossed = disc
                    .insert_sorted(
                        params,
                        consts,
                        child.jset.vertices(),
                        Cause::Edge,
                        Some(&head_sorted),
                    )
                    .map_err(|e| SearchError::Internal(e.to_string()))?;
                let id = nodes.len() as u32;
                nodes.push(Node {
                    parent: Some(head),
                    tail: child.tail.clone(),
                    seed_idx: head_seed,
                    aug_len: head_aug + 1,
                    generation: head_gen + 1,
                });
                queue.push_back(id);
                order.push(id);
                activated += 1;
                if let Some(i) = crossed {
                    stop = Some(FrayStop::DegreeThreshold(i));
                } else if disc.len() >= disc_cap {
                    stop = Some(FrayStop::DiscoveryCap);
                } else if head_aug + 1 >= aug_cap {
                    stop = Some(FrayStop::LengthCap);
                }
                if stop.is_some() {
                    truncated = activated < children.len() as u64;
                    break;
                }
            }
            if stop.is_none() && children.len() as u64 != batch {
                batch_violations += 1;
            }
            if opts.record_snapshots {
                snapshots.push(SnapshotRow {
                    t: queries,
                    active: queue.len() as u64 + 1,
                    explored: explored.len() as u64,
                    newest_generation: head_gen + 1,
                });
            }
            if stop.is_some() {
                break 'outer;
            }
            if queries >= opts.query_budget {
                stop = Some(FrayStop::QueryBudget);
                break 'outer;
            }
        }
        explored.insert(crate::util::pack_subset(&head_sorted));
    }

    let ends = order
        .iter()
        .map(|&id| {
            let node = &nodes[id as usize];
            let mut chain = Vec::new();
            let mut cur = Some(id);
            while let Some(i) = cur {
                chain.push(i);
                cur = nodes[i as usize].parent;
            }
            chain.reverse();
            // Replay the tails into the extension segment.
            let mut ext: Vec<u32> = nodes[chain[0] as usize].tail.clone();
            let mut fresh = Vec::new();
            for &i in &chain[1..] {
                let tail = &nodes[i as usize].tail;
                ext.truncate(ext.len() - j);
                ext.extend_from_slice(tail);
                fresh.extend_from_slice(&tail[tail.len() - stride..]);
            }
            FrayEnd {
                jset: JSet::from_unsorted(params, {
                    let t = &nodes[id as usize].tail;
                    t[t.len() - j..].to_vec()
                })
                .expect("end tail is a j-set"),
                offset: sorted_seeds[node.seed_idx as usize].offset,
                aug_len: node.aug_len,
                generation: node.generation,
                ext,
                fresh,
            }
        })
        .collect();

    Ok(FrayOutcome {
        stop: stop.unwrap(),
        ends,
        queries,
        batch_violations,
        child_collisions,
        truncated_final_batch: truncated,
        max_degree_ratio: disc.max_threshold_ratio(params, consts),
        snapshots,
    })
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

/// Vertices outside the long path contained in at least
/// ceil(eps^2 (ln n)^3 n^(j-1)) of the given augmenting extensions.
pub fn heavy_vertices(
    params: &Params,
    consts: &RunConstants,
    fresh_per_path: &[Vec<u32>],
) -> Vec<u32> {
    let threshold = consts.heavy_threshold(params);
    let mut count = vec![0u64; params.n as usize];
    for fresh in fresh_per_path {
        for &v in fresh {
            count[v as usize] += 1;
        }
    }
    (0..params.n as u32)
        .filter(|&v| count[v as usize] >= threshold)
        .collect()
}

/// Why the family construction failed; the harness records these.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum FamilyFailure {
    #[error("fan-out run {which} stopped at {stop:?} instead of the discovery cap")]
    Run { which: u8, stop: FrayStop },
    #[error("{count} heavy vertices exceed the forbidden-set cap {cap}")]
    TooManyHeavy { count: u64, cap: u64 },
    #[error("long path has length {got}, the family needs {want}")]
    WrongPathLength { got: u64, want: u64 },
    #[error("long path too short to trim {trim} edges per side")]
    TooShort { trim: u64 },
    #[error("internal search error: {0}")]
    Internal(String),
}

/// One side of the family: the seed paths (indexed by stub offset) plus all
/// discovered ends.
#[derive(Debug)]
pub struct FamilySide {
    /// Full vertex sequence of the seed path at each offset d in [0, g).
    pub seed_seqs: Vec<Vec<u32>>,
    pub ends: Vec<FrayEnd>,
    pub stop: FrayStop,
    pub queries: u64,
}

impl FamilySide {
    /// Full path sequence of an end: its seed path with the replayed tail.
    pub fn full_sequence(&self, end: &FrayEnd) -> Vec<u32> {
        let seed = &self.seed_seqs[end.offset as usize];
        let keep = seed.len() - end.ext.len() + end.fresh.len();
        let mut seq = Vec::with_capacity(seed.len() + end.fresh.len());
        seq.extend_from_slice(&seed[..keep]);
        seq.extend_from_slice(&end.ext);
        seq
    }
}

/// The assembled structure the cycle closer consumes.
#[derive(Debug)]
pub struct AugmentingFamily {
    pub p0: TightPath,
    pub p0_prime: TightPath,
    pub j_start: JSet,
    pub j_end: JSet,
    pub side_a: FamilySide,
    pub side_b: FamilySide,
    pub heavy: Vec<u32>,
    /// Exact count of pairs whose fresh extensions are vertex-disjoint.
    pub disjoint_pairs: u64,
    /// disjoint_pairs >= (1 - eps) |A| |B|.
    pub meets_disjointness_target: bool,
}

impl AugmentingFamily {
    pub fn pair_count(&self) -> u64 {
        self.side_a.ends.len() as u64 * self.side_b.ends.len() as u64
    }

    pub fn disjoint_fraction(&self) -> f64 {
        if self.pair_count() == 0 {
            return 0.0;
        }
        self.disjoint_pairs as f64 / self.pair_count() as f64
    }
}

/// Per-side seed data: the seeds and, per stub offset, the full seed path
/// sequence.
pub type SideSeeds = (Vec<FraySeed>, Vec<Vec<u32>>);

/// Builds seed lists for both stubs of the long path. Returns the trimmed
/// core path and the per-side seed data.
pub fn stub_seeds(
    params: &Params,
    consts: &RunConstants,
    p0_prime: &TightPath,
) -> Result<(TightPath, [SideSeeds; 2]), FamilyFailure> {
    let g = consts.log_sq(params);
    if p0_prime.length() < 2 * g + 1 {
        return Err(FamilyFailure::TooShort { trim: g });
    }
    let start = p0_prime.reversed().truncate_end(params, g);
    let core = start.reversed().truncate_end(params, g);
    let p0 = core;

    let mut sides: Vec<(Vec<FraySeed>, Vec<Vec<u32>>)> = Vec::new();
    for endpoint in 0..2 {
        let oriented = if endpoint == 0 {
            p0_prime.reversed()
        } else {
            p0_prime.clone()
        };
        let mut seeds = Vec::new();
        let mut seqs = Vec::new();
        for d in 0..g {
            let sp = oriented.truncate_end(params, d);
            let jset = sp.end_jset(params);
            let tail = sp.end_tail(params).to_vec();
            seeds.push(FraySeed {
                jset,
                tail,
                aug_len: g - d,
                offset: d,
            });
            seqs.push(sp.vertices().to_vec());
        }
        sides.push((seeds, seqs));
    }
    let side_b = sides.pop().unwrap();
    let side_a = sides.pop().unwrap();
    Ok((p0, [side_a, side_b]))
}

#[derive(Debug, Clone)]
pub struct FamilyOpts {
    pub round: usize,
    pub query_budget: u64,
    pub record_snapshots: bool,
}

impl Default for FamilyOpts {
    fn default() -> Self {
        FamilyOpts {
            round: 0,
            query_budget: u64::MAX,
            record_snapshots: false,
        }
    }
}

/// Runs the fan-out on both stubs of the long path (forbidding heavy
/// vertices the second time), counts vertex-disjoint pairs, and returns the
/// family. Both runs must stop at their discovery cap.
pub fn build_family(
    oracle: &mut EdgeOracle,
    params: &Params,
    consts: &RunConstants,
    p0_prime: &TightPath,
    opts: &FamilyOpts,
) -> Result<AugmentingFamily, FamilyFailure> {
    let want = consts.long_path_target(params);
    if p0_prime.length() != want {
        return Err(FamilyFailure::WrongPathLength {
            got: p0_prime.length(),
            want,
        });
    }
    let (p0, [(seeds_a, seqs_a), (seeds_b, seqs_b)]) = stub_seeds(params, consts, p0_prime)?;
    let fray_opts = FrayOpts {
        round: opts.round,
        query_budget: opts.query_budget,
        record_snapshots: opts.record_snapshots,
    };

    oracle.set_phase(crate::oracle::PHASE_FRAY1);
    let run_a = fray(oracle, params, consts, p0_prime, &seeds_a, &[], &fray_opts)
        .map_err(|e| FamilyFailure::Internal(e.to_string()))
        .and_then(|out| {
            if out.stop == FrayStop::DiscoveryCap {
                Ok(out)
            } else {
                Err(FamilyFailure::Run {
                    which: 1,
                    stop: out.stop,
                })
            }
        })?;

    let fresh_lists: Vec<Vec<u32>> = run_a.ends.iter().map(|e| e.fresh.clone()).collect();
    let heavy = heavy_vertices(params, consts, &fresh_lists);
    let heavy_cap = (consts.delta * consts.delta * params.n as f64).floor() as u64;
    if heavy.len() as u64 > heavy_cap {
        return Err(FamilyFailure::TooManyHeavy {
            count: heavy.len() as u64,
            cap: heavy_cap,
        });
    }

    oracle.set_phase(crate::oracle::PHASE_FRAY2);
    let run_b = fray(oracle, params, consts, p0_prime, &seeds_b, &heavy, &fray_opts)
        .map_err(|e| FamilyFailure::Internal(e.to_string()))
        .and_then(|out| {
            if out.stop == FrayStop::DiscoveryCap {
                Ok(out)
            } else {
                Err(FamilyFailure::Run {
                    which: 2,
                    stop: out.stop,
                })
            }
        })?;

    let disjoint_pairs = count_disjoint_pairs(params, &run_a.ends, &run_b.ends);
    let total = run_a.ends.len() as u64 * run_b.ends.len() as u64;
    let meets = disjoint_pairs as f64 >= (1.0 - consts.eps) * total as f64;

    let j_start = p0.start_jset(params);
    let j_end = p0.end_jset(params);
    Ok(AugmentingFamily {
        p0,
        p0_prime: p0_prime.clone(),
        j_start,
        j_end,
        side_a: FamilySide {
            seed_seqs: seqs_a,
            ends: run_a.ends,
            stop: run_a.stop,
            queries: run_a.queries,
        },
        side_b: FamilySide {
            seed_seqs: seqs_b,
            ends: run_b.ends,
            stop: run_b.stop,
            queries: run_b.queries,
        },
        heavy,
        disjoint_pairs,
        meets_disjointness_target: meets,
    })
}

/// Exact disjoint-pair count via per-vertex bitmasks over side-A indices.
pub fn count_disjoint_pairs(params: &Params, side_a: &[FrayEnd], side_b: &[FrayEnd]) -> u64 {
    let words = side_a.len().div_ceil(64);
    let mut per_vertex: Vec<Vec<u64>> = vec![Vec::new(); params.n as usize];
    for (ai, a) in side_a.iter().enumerate() {
        for &v in &a.fresh {
            let m = &mut per_vertex[v as usize];
            if m.is_empty() {
                m.resize(words, 0);
            }
            m[ai / 64] |= 1u64 << (ai % 64);
        }
    }
    let mut acc = vec![0u64; words];
    let mut disjoint: u64 = 0;
    for b in side_b {
        for w in acc.iter_mut() {
            *w = 0;
        }
        for &v in &b.fresh {
            let m = &per_vertex[v as usize];
            for (a, mv) in acc.iter_mut().zip(m) {
                *a |= mv;
            }
        }
        let colliding: u64 = acc.iter().map(|w| w.count_ones() as u64).sum();
        disjoint += side_a.len() as u64 - colliding;
    }
    disjoint
}
