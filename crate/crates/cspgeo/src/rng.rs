//! Seeded random number generation.
//!
//! Every randomized operation in this crate is a pure function of its
//! parameters and a 64-bit seed. The generator is SplitMix64 (Steele,
//! Lea & Flood's `splitmix64` finalizer over a Weyl sequence): the state
//! advances by a fixed odd constant and each output is an avalanche mix
//! of the counter, so independent streams are obtained by mixing a seed
//! with a stream tag rather than by jumping.
//!
//! The algorithm is pinned: `tests::pinned_output_vectors` freezes the
//! first outputs for a known seed, so any change to the generator or to
//! the derivation scheme is a deliberate, test-visible event.

const GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
fn mix64(mut z: u64) -> u64 {
    z ^= z >> 30;
    z = z.wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z ^= z >> 27;
    z = z.wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derive an independent child seed from `(seed, tag)`.
///
/// Used for the documented seed tree: experiment seed -> grid point ->
/// trial -> operation. Children with distinct tags are independent
/// streams of the same quality as fresh seeds.
pub fn derive(seed: u64, tag: u64) -> u64 {
    mix64(seed ^ mix64(tag.wrapping_mul(GAMMA).wrapping_add(0x5851_F42D_4C95_7F2D)))
}

/// Two-level derivation, `derive(derive(seed, a), b)`.
pub fn derive2(seed: u64, a: u64, b: u64) -> u64 {
    derive(derive(seed, a), b)
}

/// Three-level derivation.
pub fn derive3(seed: u64, a: u64, b: u64, c: u64) -> u64 {
    derive(derive2(seed, a, b), c)
}

/// SplitMix64 stream.
#[derive(Clone, Debug)]
pub struct Rng {
    state: u64,
}

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng { state: seed }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GAMMA);
        mix64(self.state)
    }

    /// Uniform double in [0, 1) with 53 random bits.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in [0, n). Rejection sampling, no modulo bias.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0, "below(0)");
        let threshold = n.wrapping_neg() % n;
        loop {
            let r = self.next_u64();
            if r >= threshold {
                return r % n;
            }
        }
    }

    pub fn below_usize(&mut self, n: usize) -> usize {
        self.below(n as u64) as usize
    }

    /// Bernoulli(p).
    pub fn chance(&mut self, p: f64) -> bool {
        self.next_f64() < p
    }

    /// Fisher-Yates shuffle.
    pub fn shuffle<T>(&mut self, xs: &mut [T]) {
        for i in (1..xs.len()).rev() {
            let j = self.below((i + 1) as u64) as usize;
            xs.swap(i, j);
        }
    }

    /// Uniform `m`-subset of {0, .., universe-1}, returned sorted.
    /// Floyd's algorithm: O(m) draws regardless of universe size.
    pub fn distinct_sorted(&mut self, universe: u64, m: u64) -> Vec<u64> {
        assert!(m <= universe, "distinct_sorted: m > universe");
        let mut chosen = std::collections::HashSet::with_capacity(m as usize);
        for j in universe - m..universe {
            let t = self.below(j + 1);
            if !chosen.insert(t) {
                chosen.insert(j);
            }
        }
        let mut out: Vec<u64> = chosen.into_iter().collect();
        out.sort_unstable();
        out
    }

    /// Indices of {0, .., universe-1} included independently with
    /// probability `p`, via geometric gap skipping. Returned sorted.
    pub fn independent_sorted(&mut self, universe: u64, p: f64) -> Vec<u64> {
        assert!((0.0..=1.0).contains(&p), "independent_sorted: p out of range");
        if p <= 0.0 {
            return Vec::new();
        }
        if p >= 1.0 {
            return (0..universe).collect();
        }
        let log_q = (1.0 - p).ln();
        let mut out = Vec::new();
        let mut pos: u64 = 0;
        loop {
            // Geometric(p) number of skipped indices before the next hit.
            let u = 1.0 - self.next_f64(); // (0, 1]
            let gap = (u.ln() / log_q).floor();
            if !gap.is_finite() || gap >= (universe - pos) as f64 {
                break;
            }
            pos += gap as u64;
            out.push(pos);
            pos += 1;
            if pos >= universe {
                break;
            }
        }
        out
    }

    /// Uniform `m`-subset of the provided slice (order of picks discarded).
    pub fn sample_from<T: Copy>(&mut self, items: &[T], m: usize) -> Vec<T> {
        self.distinct_sorted(items.len() as u64, m as u64)
            .into_iter()
            .map(|i| items[i as usize])
            .collect()
    }
}
