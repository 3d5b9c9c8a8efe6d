//! Closing a pair of family ends into a certified tight cycle with
//! second-round edges.
//!
//! A pair (A, B) with vertex-disjoint extensions yields one concatenated
//! path from A to B containing the protected core. Closing it needs s
//! bridge edges and b vertices from outside the path; the bridge windows
//! are the cyclic stride windows spanning the B end, the extra vertices and
//! the A end. Pairs are sampled in seeded-random order and every candidate
//! cycle is re-validated against the oracle before it is returned.

use crate::fray::AugmentingFamily;
use crate::oracle::EdgeOracle;
use crate::params::{Params, RunConstants};
use crate::path::{validate_cycle, TightCycle};
use crate::pathfinder::SearchError;
use crate::util::{SplitMix64, VertexMask};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CloseError {
    #[error("need exactly {want} junction vertices, got {got}")]
    WrongExtraCount { want: u64, got: usize },
    #[error("junction vertices must avoid the path")]
    ExtraOverlapsPath,
    #[error("sequence of {0} vertices is not a whole number of windows")]
    BadSequence(usize),
}

/// The s cyclic windows a closing configuration must supply, given the
/// concatenated path sequence and the b junction vertices appended at the
/// wrap. The first |path| windows of the induced cycle are the path's own
/// edges; these are the rest, each returned sorted.
pub fn closing_windows(
    params: &Params,
    path_seq: &[u32],
    extra: &[u32],
) -> Result<Vec<Vec<u32>>, CloseError> {
    if extra.len() as u64 != params.b {
        return Err(CloseError::WrongExtraCount {
            want: params.b,
            got: extra.len(),
        });
    }
    if extra.iter().any(|v| path_seq.contains(v)) {
        return Err(CloseError::ExtraOverlapsPath);
    }
    let stride = params.stride() as usize;
    let j = params.j as usize;
    if path_seq.len() < j || !(path_seq.len() - j).is_multiple_of(stride) {
        return Err(CloseError::BadSequence(path_seq.len()));
    }
    // The bridge windows live on: last j of the path, the extras, first j.
    let mut segment: Vec<u32> = Vec::with_capacity(2 * j + extra.len());
    segment.extend_from_slice(&path_seq[path_seq.len() - j..]);
    segment.extend_from_slice(extra);
    segment.extend_from_slice(&path_seq[..j]);
    let mut out = Vec::with_capacity(params.s as usize);
    for i in 0..params.s as usize {
        let mut w: Vec<u32> = segment[i * stride..i * stride + params.k as usize].to_vec();
        w.sort_unstable();
        out.push(w);
    }
    Ok(out)
}

/// First-moment estimate of closures among `triples` admissible
/// configurations when each bridge edge appears with probability
/// `p_second`.
pub fn expected_closures(triples: f64, params: &Params, p_second: f64) -> f64 {
    triples * p_second.powi(params.s as i32)
}

#[derive(Debug)]
pub struct CloseOutcome {
    pub cycle: Option<TightCycle>,
    /// Sampled (A, B) draws, admissible or not.
    pub attempts: u64,
    /// Draws rejected because the extensions shared a vertex.
    pub overlapping_pairs: u64,
    /// Bridge successes whose assembled cycle failed re-validation.
    pub validation_rejects: u64,
}

/// Samples admissible pairs in seeded-random order, queries their bridge
/// windows in `round`, and returns the first configuration whose assembled
/// cycle validates against the oracle. `None` once the budget is spent.
pub fn try_close(
    family: &AugmentingFamily,
    oracle: &mut EdgeOracle,
    params: &Params,
    consts: &RunConstants,
    budget: u64,
    seed: u64,
    round: usize,
) -> Result<CloseOutcome, SearchError> {
    let stride = params.stride() as usize;
    let j = params.j as usize;
    let g = consts.log_sq(params);
    let na = family.side_a.ends.len() as u64;
    let nb = family.side_b.ends.len() as u64;
    let mut out = CloseOutcome {
        cycle: None,
        attempts: 0,
        overlapping_pairs: 0,
        validation_rejects: 0,
    };
    if na == 0 || nb == 0 {
        return Ok(out);
    }

    // Fresh-extension masks for the O(words) disjointness test.
    let masks_a: Vec<VertexMask> = family
        .side_a
        .ends
        .iter()
        .map(|e| {
            let mut m = VertexMask::new(params.n as usize);
            m.set_all(&e.fresh);
            m
        })
        .collect();
    let masks_b: Vec<VertexMask> = family
        .side_b
        .ends
        .iter()
        .map(|e| {
            let mut m = VertexMask::new(params.n as usize);
            m.set_all(&e.fresh);
            m
        })
        .collect();
    let mut base_mask = VertexMask::new(params.n as usize);
    base_mask.set_all(family.p0_prime.vertices());

    let mut rng = SplitMix64::derive(seed, 0xC105_E001);
    let mut extra = vec![0u32; params.b as usize];

    while out.attempts < budget {
        out.attempts += 1;
        let ai = rng.below(na) as usize;
        let bi = rng.below(nb) as usize;
        let (a, b) = (&family.side_a.ends[ai], &family.side_b.ends[bi]);
        if masks_a[ai].intersects(&masks_b[bi]) {
            out.overlapping_pairs += 1;
            continue;
        }

        // Junction vertices outside the concatenated path.
        if params.b > 0 {
            let mut mask = base_mask.clone();
            mask.or_with(&masks_a[ai]);
            mask.or_with(&masks_b[bi]);
            let mut picked = 0;
            let mut tries = 0;
            while picked < params.b as usize {
                tries += 1;
                if tries > 64 * (picked + 1) {
                    break;
                }
                let v = rng.below(params.n) as u32;
                if !mask.test(v) && !extra[..picked].contains(&v) {
                    extra[picked] = v;
                    picked += 1;
                }
            }
            if picked < params.b as usize {
                continue;
            }
        }

        // Bridge windows from the two end blocks: last j of the B path,
        // the extras, then the A end reversed (the cycle runs A -> B).
        let a_ext = &a.ext;
        let b_ext = &b.ext;
        let mut segment: Vec<u32> = Vec::with_capacity(2 * j + params.b as usize);
        segment.extend_from_slice(&b_ext[b_ext.len() - j..]);
        segment.extend_from_slice(&extra[..params.b as usize]);
        segment.extend(a_ext[a_ext.len() - j..].iter().rev());
        let mut all_edges = true;
        let mut wbuf = vec![0u32; params.k as usize];
        for i in 0..params.s as usize {
            wbuf.copy_from_slice(&segment[i * stride..i * stride + params.k as usize]);
            wbuf.sort_unstable();
            if !oracle.query_canonical(&wbuf, round) {
                all_edges = false;
                break;
            }
        }
        if !all_edges {
            continue;
        }

        // Assemble the full cycle and re-validate every window.
        let seq_a = family.side_a.full_sequence(a);
        let mut cycle_verts: Vec<u32> = seq_a.iter().rev().copied().collect();
        cycle_verts.truncate(cycle_verts.len() - (g as usize) * stride);
        let seq_b = family.side_b.full_sequence(b);
        let b_suffix = seq_b.len() - (b.aug_len as usize) * stride;
        cycle_verts.extend_from_slice(&seq_b[b_suffix..]);
        cycle_verts.extend_from_slice(&extra[..params.b as usize]);
        if !validate_cycle(params, &cycle_verts, |w| oracle.query_canonical(w, round)) {
            out.validation_rejects += 1;
            continue;
        }
        let cycle = TightCycle::new(params, cycle_verts)
            .map_err(|e| SearchError::Internal(format!("validated cycle rejected: {e}")))?;
        out.cycle = Some(cycle);
        return Ok(out);
    }
    Ok(out)
}
