//! Deterministic randomness.
//!
//! Every operation that needs random bits (seed vectors, tie-breaking)
//! takes an explicit [`RandomSource`] so a run can be replayed bit for bit.

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

/// A seeded, platform-independent stream of random words and bits.
///
/// Backed by ChaCha8 (`rand_chacha`), seeded via `seed_from_u64`. Words come
/// straight from the cipher stream; single bits are drawn LSB-first from a
/// buffered word, so a tie-breaking bit costs one word per 64 ties.
#[derive(Clone, Debug)]
pub struct RandomSource {
    seed: u64,
    rng: ChaCha8Rng,
    bit_buf: u64,
    bits_left: u32,
}

impl RandomSource {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            rng: ChaCha8Rng::seed_from_u64(seed),
            bit_buf: 0,
            bits_left: 0,
        }
    }

    /// The seed this source was created from. Persistence formats record it
    /// as a provenance field.
    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// One uniform bit, from the buffered bit stream.
    pub fn next_bit(&mut self) -> bool {
        if self.bits_left == 0 {
            self.bit_buf = self.rng.next_u64();
            self.bits_left = 64;
        }
        let bit = self.bit_buf & 1 == 1;
        self.bit_buf >>= 1;
        self.bits_left -= 1;
        bit
    }

    /// Uniform integer in `[0, n)` by rejection sampling. Panics if `n` is 0.
    pub fn next_below(&mut self, n: u64) -> u64 {
        assert!(n > 0, "next_below(0)");
        if n.is_power_of_two() {
            return self.next_u64() & (n - 1);
        }
        // Reject the final partial block so every residue is equally likely.
        let zone = u64::MAX - (u64::MAX % n);
        loop {
            let v = self.next_u64();
            if v < zone {
                return v % n;
            }
        }
    }

    /// A statistically independent source derived from this source's seed and
    /// a label. Derivation is pure (SplitMix64 mixing), so substreams do not
    /// disturb or depend on the parent's position.
    pub fn substream(&self, label: u64) -> RandomSource {
        RandomSource::new(splitmix64(self.seed ^ splitmix64(label)))
    }
}

fn splitmix64(state: u64) -> u64 {
    let mut z = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
