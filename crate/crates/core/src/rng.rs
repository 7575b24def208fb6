//! Counter-based deterministic randomness.
//!
//! Every probabilistic comparison in the simulator consumes one uniform draw
//! addressed by `(seed, replica, step, cell, slot)`. Because a draw is a pure
//! hash of its address, cells can be evaluated in any order (and replicas on
//! any number of threads) without changing a single outcome.

/// Draw slots for one cell transition, in the order the comparisons are
/// evaluated by the rules.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DrawSlot {
    /// Disease-fatality check on infected cells.
    DiseaseDeath = 0,
    /// Non-disease mortality check on living cells.
    NaturalDeath = 1,
    /// Rebirth check on dead (empty) cells.
    Birth = 2,
    /// The epidemiological rule's own draw (infection or recovery).
    Transition = 3,
}

/// splitmix64 finalizer; bijective on u64 with strong avalanche.
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

/// Hashes an address of u64 fields into one well-mixed u64.
fn hash_fields(seed: u64, fields: &[u64]) -> u64 {
    let mut h = mix64(seed ^ GOLDEN_GAMMA);
    for &f in fields {
        h = mix64(h.wrapping_add(GOLDEN_GAMMA) ^ f);
    }
    h
}

/// One uniform draw in `[0, 1)` for the addressed comparison.
pub fn uniform_draw(seed: u64, replica: u64, step: u64, cell: u64, slot: DrawSlot) -> f64 {
    let h = hash_fields(seed, &[replica, step, cell, slot as u64]);
    // 53 high bits -> [0, 1)
    (h >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Sequential splitmix64 stream for one-off derivations (scenario building).
///
/// Not used on the simulation hot path; transitions draw via [`uniform_draw`].
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    /// Stream seeded from `seed` and a domain tag, so distinct uses of the
    /// same scenario seed never overlap.
    pub fn tagged(seed: u64, tag: u64) -> Self {
        SplitMix64 {
            state: hash_fields(seed, &[tag]),
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        mix64(self.state)
    }

    /// Uniform in `[0, 1)`.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in `lo..=hi`.
    ///
    /// Modulo bias is below 2^-57 for the spans used here (< 2^7).
    pub fn next_in_range(&mut self, lo: u64, hi: u64) -> u64 {
        debug_assert!(lo <= hi);
        let span = hi - lo + 1;
        lo + self.next_u64() % span
    }

    /// Fisher-Yates shuffle.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.next_in_range(0, i as u64) as usize;
            items.swap(i, j);
        }
    }
}
