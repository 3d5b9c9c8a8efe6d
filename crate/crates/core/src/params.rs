//! Parameter arithmetic shared by every search phase.
//!
//! For a k-uniform hypergraph and tightness j, the residue `a` is the unique
//! integer in [1, k-j] congruent to k modulo k-j. From it follow the block
//! count of an extendable partition (`r` + 1), the number of edges needed to
//! close a path into a cycle (`s`) and the number of outside vertices that
//! closing consumes (`b`).

use crate::util::binom_f64;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ParamError {
    #[error("uniformity k must be at least 3, got {0}")]
    UniformityTooSmall(u64),
    #[error("tightness j={j} outside [1, k-1] for k={k}")]
    TightnessOutOfRange { k: u64, j: u64 },
    #[error("vertex count n={n} must exceed k={k}")]
    TooFewVertices { n: u64, k: u64 },
    #[error("supercriticality constant c must exceed 1, got {0}")]
    SubcriticalC(f64),
    #[error("{0}")]
    BadConstants(String),
}

/// The arithmetic skeleton consumed by every module.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Params {
    pub n: u64,
    pub k: u64,
    pub j: u64,
    /// Residue of k modulo k-j, normalized into [1, k-j].
    pub a: u64,
    /// Extendable partitions have blocks (C_0, C_1, ..., C_r).
    pub r: u64,
    /// Edges needed to close a path into a cycle.
    pub s: u64,
    /// Outside vertices consumed by the closing configuration.
    pub b: u64,
}

impl Params {
    pub fn derive(n: u64, k: u64, j: u64) -> Result<Params, ParamError> {
        if k < 3 {
            return Err(ParamError::UniformityTooSmall(k));
        }
        if j < 1 || j > k - 1 {
            return Err(ParamError::TightnessOutOfRange { k, j });
        }
        if n <= k {
            return Err(ParamError::TooFewVertices { n, k });
        }
        let kj = k - j;
        let mut a = k % kj;
        if a == 0 {
            a = kj;
        }
        let r = j.div_ceil(kj) - 1;
        let s = r + 1;
        let b = kj - a;
        debug_assert_eq!(a + r * kj, j);
        debug_assert_eq!(b, s * kj - j);
        Ok(Params { n, k, j, a, r, s, b })
    }

    #[inline]
    pub fn stride(&self) -> u64 {
        self.k - self.j
    }

    /// Vertex count of a path of the given length.
    #[inline]
    pub fn path_vertices(&self, len: u64) -> u64 {
        self.j + len * self.stride()
    }

    /// Children activated per discovered edge.
    pub fn batch_size(&self) -> u64 {
        crate::util::binom_u128(self.stride(), self.a)
            .expect("batch size fits") as u64
    }

    /// Appearance threshold for a linear-length tight path:
    /// 1 / (C(k-j, a) * C(n, k-j)).
    pub fn p_zero(&self) -> f64 {
        1.0 / (binom_f64(self.stride(), self.a) * binom_f64(self.n, self.stride()))
    }

    /// Length at which edge-by-edge growth at probability c * p_zero turns
    /// from supercritical to subcritical: (1 - c^(-1/(k-j))) / (k-j) * n.
    pub fn l_one(&self, c: f64) -> Result<f64, ParamError> {
        if c <= 1.0 {
            return Err(ParamError::SubcriticalC(c));
        }
        let kj = self.stride() as f64;
        Ok((1.0 - c.powf(-1.0 / kj)) / kj * self.n as f64)
    }
}

/// Run-level constants: the slack target, the degree-threshold chain, the
/// two-round probability split and the supercriticality constant.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConstants {
    pub delta: f64,
    pub eps: f64,
    pub c_chain: Vec<f64>,
    pub omega: f64,
    pub c: f64,
}

/// Per-round edge probabilities for the two-phase reveal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoundProbs {
    pub p: f64,
    pub p_first: f64,
    pub p_second: f64,
}

impl RunConstants {
    pub fn new(
        delta: f64,
        eps: f64,
        c_chain: Vec<f64>,
        omega: f64,
        c: f64,
    ) -> Result<RunConstants, ParamError> {
        if !(0.0 < delta && delta < 1.0) {
            return Err(ParamError::BadConstants(format!(
                "delta must lie in (0,1), got {delta}"
            )));
        }
        if !(0.0 < eps && eps < delta) {
            return Err(ParamError::BadConstants(format!(
                "eps must lie in (0, delta), got {eps}"
            )));
        }
        if c_chain.is_empty() {
            return Err(ParamError::BadConstants("empty degree chain".into()));
        }
        if c_chain[0] <= 1.0 {
            return Err(ParamError::BadConstants(format!(
                "degree chain must start above 1, got {}",
                c_chain[0]
            )));
        }
        if c_chain.windows(2).any(|w| w[0] >= w[1]) {
            return Err(ParamError::BadConstants(
                "degree chain must be strictly increasing".into(),
            ));
        }
        let last = *c_chain.last().unwrap();
        if eps * last >= 1.0 {
            return Err(ParamError::BadConstants(format!(
                "eps * c_{{j-1}} = {} must stay below 1",
                eps * last
            )));
        }
        if omega <= 1.0 {
            return Err(ParamError::BadConstants(format!(
                "round split omega must exceed 1, got {omega}"
            )));
        }
        if c <= 1.0 {
            return Err(ParamError::SubcriticalC(c));
        }
        Ok(RunConstants { delta, eps, c_chain, omega, c })
    }

    /// Defaults at desk scale: delta = 0.3, eps = 0.05, chain 2 * 4^i capped
    /// below 1/eps (geometric fit when the doubling chain would overflow the
    /// cap), omega = max(8, ln n).
    pub fn defaults(params: &Params, c: f64) -> Result<RunConstants, ParamError> {
        let delta = 0.3;
        let eps = 0.05;
        let chain = default_chain(params.j as usize, eps);
        let omega = 8.0f64.max((params.n as f64).ln());
        RunConstants::new(delta, eps, chain, omega, c)
    }

    pub fn with_overrides(
        params: &Params,
        c: f64,
        delta: Option<f64>,
        eps: Option<f64>,
        omega: Option<f64>,
        chain: Option<Vec<f64>>,
    ) -> Result<RunConstants, ParamError> {
        let base = RunConstants::defaults(params, c)?;
        let delta = delta.unwrap_or(base.delta);
        let eps = eps.unwrap_or(base.eps);
        let chain = chain.unwrap_or_else(|| default_chain(params.j as usize, eps));
        let omega = omega.unwrap_or(base.omega);
        RunConstants::new(delta, eps, chain, omega, c)
    }

    /// Splits p = c * p_zero into a bulk round and a closing round so that
    /// p_first + p_second = p exactly.
    pub fn round_probs(&self, params: &Params) -> RoundProbs {
        let p = self.c * params.p_zero();
        let p_first = (1.0 - 1.0 / self.omega) * p;
        RoundProbs {
            p,
            p_first,
            p_second: p - p_first,
        }
    }

    /// Errors unless the degree chain has one constant per i in [0, j-1].
    pub fn check_chain(&self, params: &Params) -> Result<(), ParamError> {
        if self.c_chain.len() as u64 != params.j {
            return Err(ParamError::BadConstants(format!(
                "degree chain needs {} constants for j={}, got {}",
                params.j,
                params.j,
                self.c_chain.len()
            )));
        }
        Ok(())
    }

    /// Degree threshold for i-sets: ceil(eps * c_i * n^(j-i)), floored at 4
    /// so tiny instances keep a meaningful cap.
    pub fn degree_threshold(&self, params: &Params, i: usize) -> u64 {
        let ci = self.c_chain[i.min(self.c_chain.len() - 1)];
        let pow = (params.n as f64).powi((params.j - i as u64) as i32);
        let raw = ceil_exact(self.eps * ci * pow);
        (raw as u64).max(4)
    }

    /// Query cap for the depth-first phase: ceil(eps^2 * n^k), floored at 4.
    pub fn dfs_query_cap(&self, params: &Params) -> u64 {
        let raw = self.eps * self.eps * (params.n as f64).powi(params.k as i32);
        if raw >= u64::MAX as f64 {
            u64::MAX
        } else {
            (ceil_exact(raw) as u64).max(4)
        }
    }

    /// Discovery cap for the breadth-first phase: ceil(eps^2 * n^j), floored at 4.
    pub fn bfs_discovery_cap(&self, params: &Params) -> u64 {
        let raw = self.eps * self.eps * (params.n as f64).powi(params.j as i32);
        if raw >= u64::MAX as f64 {
            u64::MAX
        } else {
            (ceil_exact(raw) as u64).max(4)
        }
    }

    /// ceil((ln n)^2) floored at 4; the stub length trimmed from each end of
    /// the long path, and the generation allowance of the fan-out phase.
    pub fn log_sq(&self, params: &Params) -> u64 {
        let l = (params.n as f64).ln();
        (ceil_exact(l * l) as u64).max(4)
    }

    /// Containment-count threshold above which an outside vertex counts as
    /// heavy: ceil(eps^2 * (ln n)^3 * n^(j-1)), floored at 4.
    pub fn heavy_threshold(&self, params: &Params) -> u64 {
        let l = (params.n as f64).ln();
        let raw = self.eps * self.eps * l.powi(3) * (params.n as f64).powi(params.j as i32 - 1);
        (ceil_exact(raw) as u64).max(4)
    }

    /// Default length stop of the standalone depth-first search.
    pub fn dfs_length_target(&self, params: &Params) -> u64 {
        let l1 = params.l_one(self.c).expect("validated c > 1");
        ceil_exact((1.0 - self.delta / 3.0) * l1) as u64
    }

    /// Length of the trimmed core path the family phase protects.
    pub fn core_path_len(&self, params: &Params) -> u64 {
        let l1 = params.l_one(self.c).expect("validated c > 1");
        ceil_exact((1.0 - self.delta / 2.0) * l1) as u64
    }

    /// Length of the long path a trial must build before fanning out:
    /// core length plus one stub of ceil((ln n)^2) edges at each end.
    pub fn long_path_target(&self, params: &Params) -> u64 {
        self.core_path_len(params) + 2 * self.log_sq(params)
    }
}

/// Ceiling that forgives float noise: values within 1e-6 of an integer
/// round to it instead of spilling upward.
pub(crate) fn ceil_exact(x: f64) -> f64 {
    let r = x.round();
    if (x - r).abs() < 1e-6 {
        r
    } else {
        x.ceil()
    }
}

fn default_chain(j: usize, eps: f64) -> Vec<f64> {
    let len = j.max(1);
    let cap = 0.9 / eps;
    let doubling: Vec<f64> = (0..len).map(|i| 2.0 * 4.0f64.powi(i as i32)).collect();
    if *doubling.last().unwrap() < cap {
        return doubling;
    }
    // Geometric chain from 2 to the cap keeps strict growth under eps * c < 1.
    if len == 1 {
        return vec![2.0f64.min(cap * 0.5)];
    }
    let ratio = (cap / 2.0).powf(1.0 / (len as f64 - 1.0));
    (0..len).map(|i| 2.0 * ratio.powi(i as i32)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    // Independent binomial for cross-checking p_zero, factorial route.
    fn binom_fact(n: u64, k: u64) -> u128 {
        fn fact(x: u64) -> u128 {
            (1..=x as u128).product::<u128>().max(1)
        }
        if k > n {
            return 0;
        }
        fact(n) / (fact(k) * fact(n - k))
    }

    #[test]
    fn derive_74_matches_hand_computation() {
        let p = Params::derive(100, 7, 4).unwrap();
        assert_eq!((p.a, p.r, p.s, p.b), (1, 1, 2, 2));
    }

    #[test]
    fn derive_32_forced_values() {
        let p = Params::derive(100, 3, 2).unwrap();
        assert_eq!((p.a, p.r, p.s, p.b), (1, 1, 2, 0));
    }

    #[test]
    fn derive_42_even_residue() {
        let p = Params::derive(100, 4, 2).unwrap();
        assert_eq!((p.a, p.r, p.s, p.b), (2, 0, 1, 0));
    }

    #[test]
    fn derive_rejects_bad_inputs() {
        assert!(Params::derive(100, 2, 1).is_err());
        assert!(Params::derive(100, 5, 0).is_err());
        assert!(Params::derive(100, 5, 5).is_err());
        assert!(Params::derive(5, 5, 2).is_err());
    }

    #[test]
    fn identities_hold_exhaustively() {
        for k in 3..=12u64 {
            for j in 1..k {
                let p = Params::derive(1000, k, j).unwrap();
                let kj = k - j;
                assert!(1 <= p.a && p.a <= kj);
                assert_eq!((k - p.a) % kj, 0, "a = k mod k-j for ({k},{j})");
                assert_eq!(p.a + p.r * kj, j);
                assert_eq!(p.s, j.div_ceil(kj));
                assert_eq!(p.b, kj - p.a);
                assert_eq!(p.b, p.s * kj - j);
                assert!(p.b < kj);
            }
        }
    }

    #[test]
    fn p_zero_small_cases() {
        let p = Params::derive(100, 3, 2).unwrap();
        assert!((p.p_zero() - 0.01).abs() < 1e-15);

        // Independent factorial-route binomials.
        let p = Params::derive(20, 7, 4).unwrap();
        let expect = 1.0 / (binom_fact(3, 1) as f64 * binom_fact(20, 3) as f64);
        assert!((expect - 1.0 / 3420.0).abs() < 1e-18);
        assert!((p.p_zero() - expect).abs() < 1e-18);

        let p = Params::derive(10, 4, 2).unwrap();
        let expect = 1.0 / (binom_fact(2, 2) as f64 * binom_fact(10, 2) as f64);
        assert!((expect - 1.0 / 45.0).abs() < 1e-18);
        assert!((p.p_zero() - expect).abs() < 1e-18);
    }

    #[test]
    fn l_one_closed_forms() {
        let p = Params::derive(1000, 3, 2).unwrap();
        assert!((p.l_one(4.0).unwrap() - 750.0).abs() < 1e-9);
        let p = Params::derive(1000, 4, 2).unwrap();
        assert!((p.l_one(4.0).unwrap() - 250.0).abs() < 1e-9);
        // c -> 1+ collapses the supercritical window.
        let p = Params::derive(1000, 5, 3).unwrap();
        assert!(p.l_one(1.0 + 1e-12).unwrap() < 1e-3);
        assert!(p.l_one(1.0).is_err());
        assert!(p.l_one(0.5).is_err());
    }

    #[test]
    fn round_probs_split_exactly() {
        let p = Params::derive(2000, 3, 2).unwrap();
        let rc = RunConstants::defaults(&p, 4.0).unwrap();
        let rp = rc.round_probs(&p);
        assert!((rp.p_first + rp.p_second - rp.p).abs() < 1e-18);
        assert!((rp.p - 4.0 * p.p_zero()).abs() < 1e-18);
        assert!(rp.p_first > rp.p_second);
    }

    #[test]
    fn constants_validation() {
        let p = Params::derive(2000, 3, 2).unwrap();
        assert!(RunConstants::new(0.3, 0.05, vec![2.0, 8.0], 8.0, 4.0).is_ok());
        assert!(RunConstants::new(0.0, 0.05, vec![2.0, 8.0], 8.0, 4.0).is_err());
        assert!(RunConstants::new(0.3, 0.4, vec![2.0, 8.0], 8.0, 4.0).is_err());
        assert!(RunConstants::new(0.3, 0.05, vec![8.0, 2.0], 8.0, 4.0).is_err());
        assert!(RunConstants::new(0.3, 0.05, vec![2.0, 30.0], 8.0, 4.0).is_err());
        assert!(RunConstants::new(0.3, 0.05, vec![2.0, 8.0], 0.9, 4.0).is_err());
        assert!(RunConstants::new(0.3, 0.05, vec![2.0, 8.0], 8.0, 1.0).is_err());
        let _ = p;
        // Default chains stay under the eps cap for every tightness we search.
        for (k, j) in [(3, 2), (4, 2), (5, 3), (7, 4), (8, 6)] {
            let pj = Params::derive(4000, k, j).unwrap();
            let rc = RunConstants::defaults(&pj, 2.0).unwrap();
            assert_eq!(rc.c_chain.len(), j as usize);
            assert!(rc.eps * rc.c_chain.last().unwrap() < 1.0);
        }
    }

    #[test]
    fn caps_hit_exact_integers() {
        // eps^2 n^j is exactly 10000 at (n, j, eps) = (2000, 2, 0.05);
        // float noise must not push the ceiling to 10001.
        let p = Params::derive(2000, 3, 2).unwrap();
        let rc = RunConstants::defaults(&p, 4.0).unwrap();
        assert_eq!(rc.bfs_discovery_cap(&p), 10_000);
    }

    #[test]
    fn finite_size_floors() {
        let p = Params::derive(10, 3, 2).unwrap();
        let rc = RunConstants::defaults(&p, 4.0).unwrap();
        assert!(rc.bfs_discovery_cap(&p) >= 4);
        assert!(rc.log_sq(&p) >= 4);
        assert!(rc.heavy_threshold(&p) >= 4);
    }
}
