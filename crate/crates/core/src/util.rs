//! Small shared utilities: deterministic mixing, vertex bitmasks, binomials
//! and a resumable combination cursor.

/// 64-bit finalizer with strong avalanche (splitmix-style). Used for both
/// the keyed edge draws and the small in-process RNG.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z ^= z >> 30;
    z = z.wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z ^= z >> 27;
    z = z.wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Minimal deterministic RNG. Not crypto; just stable and fast, so that
/// every decision in a trial is reproducible from its seed.
#[derive(Debug, Clone, Copy)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    /// Derives an independent stream for a named purpose so that call-order
    /// changes in one phase never perturb another phase's draws.
    pub fn derive(seed: u64, tag: u64) -> Self {
        SplitMix64 {
            state: mix64(seed ^ tag.wrapping_mul(0xA24B_AED4_963E_E407)),
        }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        mix64(self.state)
    }

    /// Uniform in [0, bound) by rejection; bound must be nonzero.
    #[inline]
    pub fn below(&mut self, bound: u64) -> u64 {
        debug_assert!(bound > 0);
        let zone = u64::MAX - (u64::MAX % bound);
        loop {
            let r = self.next_u64();
            if r < zone {
                return r % bound;
            }
        }
    }

    #[inline]
    pub fn unit_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / 9_007_199_254_740_992.0)
    }
}

/// Hasher for keys that are already well-mixed fingerprints (the oracle's
/// k-set fingerprints and packed vertex subsets).
#[derive(Default, Clone)]
pub struct FingerprintHasher {
    state: u64,
}

impl std::hash::Hasher for FingerprintHasher {
    #[inline]
    fn finish(&self) -> u64 {
        self.state
    }

    fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.state = mix64(self.state ^ b as u64);
        }
    }

    #[inline]
    fn write_u64(&mut self, x: u64) {
        self.state = self.state.rotate_left(29) ^ x;
    }

    #[inline]
    fn write_u128(&mut self, x: u128) {
        self.state = self.state.rotate_left(29) ^ mix64(x as u64 ^ mix64((x >> 64) as u64));
    }
}

pub type FingerprintState = std::hash::BuildHasherDefault<FingerprintHasher>;
pub type FastMap<K, V> = std::collections::HashMap<K, V, FingerprintState>;
pub type FastSet<T> = std::collections::HashSet<T, FingerprintState>;

/// Fixed-width bitmask over vertex identifiers 0..n.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexMask {
    words: Vec<u64>,
}

impl VertexMask {
    pub fn new(n: usize) -> Self {
        VertexMask {
            words: vec![0; n.div_ceil(64)],
        }
    }

    #[inline]
    pub fn set(&mut self, v: u32) {
        self.words[(v / 64) as usize] |= 1u64 << (v % 64);
    }

    #[inline]
    pub fn clear(&mut self, v: u32) {
        self.words[(v / 64) as usize] &= !(1u64 << (v % 64));
    }

    #[inline]
    pub fn test(&self, v: u32) -> bool {
        self.words[(v / 64) as usize] >> (v % 64) & 1 == 1
    }

    pub fn set_all(&mut self, verts: &[u32]) {
        for &v in verts {
            self.set(v);
        }
    }

    pub fn or_with(&mut self, other: &VertexMask) {
        for (w, o) in self.words.iter_mut().zip(&other.words) {
            *w |= o;
        }
    }

    pub fn intersects(&self, other: &VertexMask) -> bool {
        self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0)
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }
}

/// Packs a sorted vertex subset of size <= 8 into a single key.
/// Vertices are offset by one so that {0} and {} cannot collide.
#[inline]
pub fn pack_subset(verts: &[u32]) -> u128 {
    debug_assert!(verts.len() <= 8);
    let mut key: u128 = 0;
    for &v in verts {
        debug_assert!(v < 0xFFFF);
        key = (key << 16) | (v as u128 + 1);
    }
    key
}

/// Exact binomial coefficient, None on overflow.
pub fn binom_u128(n: u64, k: u64) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul((n - i) as u128)?;
        acc /= (i + 1) as u128;
    }
    Some(acc)
}

/// Binomial coefficient in floating point, for probabilities at scales
/// where the exact value does not fit an integer.
pub fn binom_f64(n: u64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0f64;
    for i in 0..k {
        acc *= (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

/// Lexicographic cursor over m-subsets of a fixed pool, resumable between
/// calls. The pool is borrowed per call so a caller can keep it alongside.
#[derive(Debug, Clone)]
pub struct CombCursor {
    idx: Vec<usize>,
    started: bool,
    done: bool,
}

impl CombCursor {
    pub fn new(pool_len: usize, m: usize) -> Self {
        CombCursor {
            idx: (0..m).collect(),
            started: false,
            done: m > pool_len,
        }
    }

    /// Advances to the next combination; writes the selected pool items into
    /// `out` (length m). Returns false when exhausted.
    pub fn next_into(&mut self, pool: &[u32], out: &mut [u32]) -> bool {
        let m = self.idx.len();
        if self.done {
            return false;
        }
        if m == 0 {
            // Single empty combination.
            if self.started {
                self.done = true;
                return false;
            }
            self.started = true;
            return true;
        }
        if !self.started {
            self.started = true;
        } else {
            // Standard odometer advance.
            let n = pool.len();
            let mut i = m;
            loop {
                if i == 0 {
                    self.done = true;
                    return false;
                }
                i -= 1;
                if self.idx[i] < n - (m - i) {
                    self.idx[i] += 1;
                    for l in i + 1..m {
                        self.idx[l] = self.idx[l - 1] + 1;
                    }
                    break;
                }
            }
        }
        for (o, &i) in out.iter_mut().zip(&self.idx) {
            *o = pool[i];
        }
        true
    }
}
