//! Deterministic pseudo-randomness for splits, clustering, resampling, and
//! synthetic data.
//!
//! Everything random in this crate flows through [`SplitMix64`], seeded either
//! directly or through [`derive_seed`]. SplitMix64 (Steele, Lea & Vigna 2014,
//! as published in the Java 8 `SplittableRandom` reference implementation) has
//! a 64-bit state, passes BigCrush, and is trivial to reimplement bit-for-bit
//! in any language, so seeds written into reports and model files reproduce
//! the same streams everywhere. The generator update is:
//!
//! ```text
//! state += 0x9E3779B97F4A7C15
//! z = state
//! z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//! z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//! output = z ^ (z >> 31)
//! ```
//!
//! Floats in `[0, 1)` take the top 53 bits; Gaussians use the Box-Muller
//! transform (cosine branch only); bounded integers use the multiply-shift
//! reduction `(x * n) >> 64`. Sub-seeds are derived from one master seed by
//! hashing a component name (FNV-1a) and an index through the SplitMix64
//! finalizer, so independent components never share a stream by accident.

/// Splittable 64-bit-state PRNG. See the module docs for the exact algorithm.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// The SplitMix64 output finalizer, also used standalone as a bit mixer when
/// deriving sub-seeds.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// FNV-1a over a byte string; stable across platforms.
fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h = 0xcbf2_9ce4_8422_2325u64;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x1_0000_0000_01b3);
    }
    h
}

/// Derives a sub-seed from a master seed, a component name, and an index.
///
/// Used so that, for example, bootstrap trial 17 and the k-means init both
/// descend from the one user-facing `--seed` without ever sharing a stream:
/// `derive_seed(seed, "bootstrap-trial", 17)` vs `derive_seed(seed, "kmeans-init", 0)`.
pub fn derive_seed(master: u64, component: &str, index: u64) -> u64 {
    let tagged = mix64(master ^ fnv1a(component.as_bytes()));
    mix64(tagged ^ index.wrapping_mul(GOLDEN_GAMMA))
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        mix64(self.state)
    }

    /// Uniform in `[0, 1)` with 53 bits of precision.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `{0, 1, ..., n-1}` via multiply-shift. `n` must be nonzero.
    #[inline]
    pub fn gen_range(&mut self, n: usize) -> usize {
        debug_assert!(n > 0);
        (((self.next_u64() as u128) * (n as u128)) >> 64) as usize
    }

    /// Standard normal via Box-Muller. One uniform pair per sample; the sine
    /// branch is discarded to keep the stream position independent of call
    /// pairing.
    pub fn next_gaussian(&mut self) -> f64 {
        // u1 in (0, 1] so the log is finite.
        let u1 = ((self.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64);
        let u2 = self.next_f64();
        (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
    }

    /// In-place Fisher-Yates shuffle.
    pub fn shuffle<T>(&mut self, xs: &mut [T]) {
        for i in (1..xs.len()).rev() {
            let j = self.gen_range(i + 1);
            xs.swap(i, j);
        }
    }

    /// `k` distinct indices from `0..n`, in selection order (partial
    /// Fisher-Yates). Requires `k <= n`.
    pub fn sample_distinct(&mut self, n: usize, k: usize) -> Vec<usize> {
        debug_assert!(k <= n);
        let mut pool: Vec<usize> = (0..n).collect();
        for i in 0..k {
            let j = i + self.gen_range(n - i);
            pool.swap(i, j);
        }
        pool.truncate(k);
        pool
    }
}
