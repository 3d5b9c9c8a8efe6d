//! Exact longest path and cycle on small explicit instances, by exhaustive
//! backtracking over vertex sequences with window pruning.
//!
//! This is the ground truth the search pipeline is compared against. It
//! shares only the validators with the pipeline; the enumeration itself is
//! independent of the search modules.

use crate::params::Params;
use crate::path::validate_cycle;
use std::collections::HashSet;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BruteError {
    #[error("instance n={n} exceeds the exhaustive-search cap {cap}")]
    TooLarge { n: u64, cap: u64 },
    #[error("step budget {0} exhausted before the search completed")]
    BudgetExceeded(u64),
    #[error("{0}")]
    BadInstance(String),
}

pub const DEFAULT_CAP: u64 = 12;
pub const DEFAULT_BUDGET: u64 = 100_000_000;

/// A fully materialized instance small enough to search exhaustively.
#[derive(Debug, Clone)]
pub struct SmallInstance {
    pub params: Params,
    pub edges: Vec<Vec<u32>>,
    edge_set: HashSet<Vec<u32>>,
}

impl SmallInstance {
    pub fn new(
        n: u64,
        k: u64,
        j: u64,
        edges: Vec<Vec<u32>>,
        cap: u64,
    ) -> Result<SmallInstance, BruteError> {
        if n > cap {
            return Err(BruteError::TooLarge { n, cap });
        }
        let params =
            Params::derive(n, k, j).map_err(|e| BruteError::BadInstance(e.to_string()))?;
        let mut canon = Vec::with_capacity(edges.len());
        for e in &edges {
            let mut s = e.clone();
            s.sort_unstable();
            s.dedup();
            if s.len() as u64 != k || s.iter().any(|&v| v as u64 >= n) {
                return Err(BruteError::BadInstance(format!("bad edge {e:?}")));
            }
            canon.push(s);
        }
        canon.sort();
        canon.dedup();
        let edge_set: HashSet<Vec<u32>> = canon.iter().cloned().collect();
        Ok(SmallInstance {
            params,
            edges: canon,
            edge_set,
        })
    }

    pub fn complete(n: u64, k: u64, j: u64) -> Result<SmallInstance, BruteError> {
        let mut edges = Vec::new();
        let pool: Vec<u32> = (0..n as u32).collect();
        let mut cur = crate::util::CombCursor::new(pool.len(), k as usize);
        let mut buf = vec![0u32; k as usize];
        while cur.next_into(&pool, &mut buf) {
            edges.push(buf.clone());
        }
        SmallInstance::new(n, k, j, edges, n.max(DEFAULT_CAP))
    }

    #[inline]
    pub fn is_edge(&self, sorted: &[u32]) -> bool {
        self.edge_set.contains(sorted)
    }
}

struct Searcher<'a> {
    inst: &'a SmallInstance,
    stride: usize,
    j: usize,
    b: usize,
    budget: u64,
    best_path: u64,
    best_cycle: Option<u64>,
    max_path_len: u64,
    max_cycle_len: u64,
    want_cycle: bool,
}

impl<'a> Searcher<'a> {
    fn new(inst: &'a SmallInstance, budget: u64, want_cycle: bool) -> Self {
        let p = &inst.params;
        Searcher {
            inst,
            stride: p.stride() as usize,
            j: p.j as usize,
            b: p.b as usize,
            budget,
            best_path: 0,
            best_cycle: None,
            max_path_len: (p.n - p.j) / p.stride(),
            max_cycle_len: p.n / p.stride(),
            want_cycle,
        }
    }

    fn step(&mut self) -> Result<(), BruteError> {
        if self.budget == 0 {
            return Err(BruteError::BudgetExceeded(0));
        }
        self.budget -= 1;
        Ok(())
    }

    fn done(&self) -> bool {
        let path_done = self.best_path >= self.max_path_len;
        let cycle_done = !self.want_cycle
            || self.best_cycle.is_some_and(|c| c >= self.max_cycle_len);
        path_done && cycle_done
    }

    fn run(&mut self) -> Result<(), BruteError> {
        let edges = self.inst.edges.clone();
        for e in &edges {
            let mut arrangements = Vec::new();
            self.initial_arrangements(e, &mut Vec::new(), &mut arrangements);
            for arr in arrangements {
                let mut used = vec![false; self.inst.params.n as usize];
                for &v in &arr {
                    used[v as usize] = true;
                }
                let mut seq = arr;
                self.extend(&mut seq, &mut used)?;
                if self.done() {
                    return Ok(());
                }
            }
        }
        Ok(())
    }

    /// Orderings of an edge usable as the first window. When the closing
    /// residue b is zero every window splits into whole stride blocks, so
    /// blocks may be kept sorted; otherwise all orderings are tried.
    fn initial_arrangements(&self, edge: &[u32], acc: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if self.b == 0 {
            self.block_sorted_arrangements(edge, acc, out);
        } else {
            permutations(edge, acc, out);
        }
    }

    fn block_sorted_arrangements(&self, rest: &[u32], acc: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if rest.is_empty() {
            out.push(acc.clone());
            return;
        }
        let m = self.stride.min(rest.len());
        let mut cur = crate::util::CombCursor::new(rest.len(), m);
        let mut block = vec![0u32; m];
        while cur.next_into(rest, &mut block) {
            let remaining: Vec<u32> = rest.iter().copied().filter(|v| !block.contains(v)).collect();
            acc.extend_from_slice(&block);
            self.block_sorted_arrangements(&remaining, acc, out);
            acc.truncate(acc.len() - m);
        }
    }

    fn extend(&mut self, seq: &mut Vec<u32>, used: &mut [bool]) -> Result<(), BruteError> {
        self.step()?;
        let len = ((seq.len() - self.j) / self.stride) as u64;
        self.best_path = self.best_path.max(len);
        if self.want_cycle {
            self.try_close(seq, used)?;
        }
        if self.done() || len >= self.max_path_len {
            return Ok(());
        }

        let unused: Vec<u32> = (0..self.inst.params.n as u32)
            .filter(|&v| !used[v as usize])
            .collect();
        let tail: Vec<u32> = seq[seq.len() - self.j..].to_vec();
        let mut cur = crate::util::CombCursor::new(unused.len(), self.stride);
        let mut fresh = vec![0u32; self.stride];
        while cur.next_into(&unused, &mut fresh) {
            let mut window: Vec<u32> = tail.iter().copied().chain(fresh.iter().copied()).collect();
            window.sort_unstable();
            if !self.inst.is_edge(&window) {
                continue;
            }
            let mut arrangements = Vec::new();
            if self.b == 0 {
                arrangements.push(fresh.clone());
            } else {
                permutations(&fresh, &mut Vec::new(), &mut arrangements);
            }
            for arr in arrangements {
                for &v in &arr {
                    used[v as usize] = true;
                }
                seq.extend_from_slice(&arr);
                self.extend(seq, used)?;
                seq.truncate(seq.len() - self.stride);
                for &v in &arr {
                    used[v as usize] = false;
                }
                if self.done() {
                    return Ok(());
                }
            }
        }
        Ok(())
    }

    /// Tries to close the current sequence into a cycle, appending every
    /// choice of b outside vertices at the junction.
    fn try_close(&mut self, seq: &[u32], used: &[bool]) -> Result<(), BruteError> {
        let p = self.inst.params;
        if self.b == 0 {
            self.step()?;
            if seq.len().is_multiple_of(self.stride)
                && validate_cycle(&p, seq, |w| self.inst.is_edge(w))
            {
                let l = seq.len() as u64 / p.stride();
                if self.best_cycle.is_none_or(|b| l > b) {
                    self.best_cycle = Some(l);
                }
            }
            return Ok(());
        }
        let unused: Vec<u32> = (0..p.n as u32).filter(|&v| !used[v as usize]).collect();
        let mut cur = crate::util::CombCursor::new(unused.len(), self.b);
        let mut extra = vec![0u32; self.b];
        while cur.next_into(&unused, &mut extra) {
            let mut arrangements = Vec::new();
            permutations(&extra, &mut Vec::new(), &mut arrangements);
            for arr in arrangements {
                self.step()?;
                let mut verts = seq.to_vec();
                verts.extend_from_slice(&arr);
                if verts.len().is_multiple_of(self.stride)
                    && validate_cycle(&p, &verts, |w| self.inst.is_edge(w))
                {
                    let l = verts.len() as u64 / p.stride();
                    if self.best_cycle.is_none_or(|b| l > b) {
                        self.best_cycle = Some(l);
                    }
                }
            }
        }
        Ok(())
    }
}

fn permutations(items: &[u32], acc: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if acc.len() == items.len() {
        out.push(acc.clone());
        return;
    }
    for &v in items {
        if !acc.contains(&v) {
            acc.push(v);
            permutations(items, acc, out);
            acc.pop();
        }
    }
}

/// Exact maximum path length, scanning every vertex sequence whose windows
/// are all edges. A budget overrun is an explicit error, never a wrong
/// answer.
pub fn brute_longest_path(inst: &SmallInstance, budget: u64) -> Result<u64, BruteError> {
    let mut s = Searcher::new(inst, budget, false);
    match s.run() {
        Ok(()) => Ok(s.best_path),
        Err(_) => Err(BruteError::BudgetExceeded(budget)),
    }
}

/// Exact maximum cycle length obeying the degeneracy rule, or None when the
/// instance has no cycle at all.
pub fn brute_longest_cycle(inst: &SmallInstance, budget: u64) -> Result<Option<u64>, BruteError> {
    let mut s = Searcher::new(inst, budget, true);
    match s.run() {
        Ok(()) => Ok(s.best_cycle),
        Err(_) => Err(BruteError::BudgetExceeded(budget)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complete_five_vertices() {
        let inst = SmallInstance::complete(5, 3, 2).unwrap();
        assert_eq!(brute_longest_path(&inst, DEFAULT_BUDGET).unwrap(), 3);
        assert_eq!(
            brute_longest_cycle(&inst, DEFAULT_BUDGET).unwrap(),
            Some(5)
        );
    }

    #[test]
    fn single_edge() {
        let inst = SmallInstance::new(6, 3, 2, vec![vec![1, 2, 3]], 12).unwrap();
        assert_eq!(brute_longest_path(&inst, DEFAULT_BUDGET).unwrap(), 1);
        assert_eq!(brute_longest_cycle(&inst, DEFAULT_BUDGET).unwrap(), None);
    }

    #[test]
    fn empty_instance() {
        let inst = SmallInstance::new(6, 3, 2, vec![], 12).unwrap();
        assert_eq!(brute_longest_path(&inst, DEFAULT_BUDGET).unwrap(), 0);
        assert_eq!(brute_longest_cycle(&inst, DEFAULT_BUDGET).unwrap(), None);
    }

    #[test]
    fn four_cycle_windows() {
        // The four cyclic windows of (1,2,3,4): no length-5 cycle exists on
        // four usable vertices, so the maximum is exactly 4.
        let edges = vec![
            vec![1, 2, 3],
            vec![2, 3, 4],
            vec![1, 3, 4],
            vec![1, 2, 4],
        ];
        let inst = SmallInstance::new(5, 3, 2, edges, 12).unwrap();
        assert_eq!(
            brute_longest_cycle(&inst, DEFAULT_BUDGET).unwrap(),
            Some(4)
        );
        assert_eq!(brute_longest_path(&inst, DEFAULT_BUDGET).unwrap(), 2);
    }

    #[test]
    fn hamilton_bound_when_stride_divides_n() {
        for n in [5u64, 6, 7, 8] {
            let inst = SmallInstance::complete(n, 3, 2).unwrap();
            assert_eq!(
                brute_longest_cycle(&inst, DEFAULT_BUDGET).unwrap(),
                Some(n),
                "complete instance on {n}"
            );
        }
        // k=4, j=2: stride 2, Hamilton cycle covers n/2 windows.
        let inst = SmallInstance::complete(8, 4, 2).unwrap();
        assert_eq!(
            brute_longest_cycle(&inst, DEFAULT_BUDGET).unwrap(),
            Some(4)
        );
    }

    #[test]
    fn budget_overrun_is_explicit() {
        let inst = SmallInstance::complete(9, 3, 2).unwrap();
        assert_eq!(
            brute_longest_path(&inst, 3),
            Err(BruteError::BudgetExceeded(3))
        );
    }

    #[test]
    fn cap_enforced() {
        assert!(matches!(
            SmallInstance::new(20, 3, 2, vec![], 12),
            Err(BruteError::TooLarge { .. })
        ));
    }

    #[test]
    fn general_b_instance_closes() {
        // k=5, j=3 gives b=1: a cycle needs one junction vertex beyond the
        // path. Plant the cyclic windows of (0,1,2,3,4,5) at stride 2.
        let p = Params::derive(7, 5, 3).unwrap();
        assert_eq!(p.b, 1);
        let seq = [0u32, 1, 2, 3, 4, 5];
        let mut edges = Vec::new();
        for i in 0..3 {
            let mut w: Vec<u32> = (0..5).map(|o| seq[(2 * i + o) % 6]).collect();
            w.sort_unstable();
            edges.push(w);
        }
        let inst = SmallInstance::new(7, 5, 3, edges, 12).unwrap();
        assert_eq!(
            brute_longest_cycle(&inst, DEFAULT_BUDGET).unwrap(),
            Some(3)
        );
    }
}
