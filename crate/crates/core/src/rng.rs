//! Counter-based random streams.
//!
//! Stream `(seed, index)` is ChaCha8 keyed by `seed` (expanded to 32 bytes
//! with `rand_core`'s `seed_from_u64`), using `index` as the ChaCha stream id
//! and starting at block counter 0. Every Monte Carlo sample `i` draws from
//! stream `(seed, i)`, so results do not depend on how samples are split
//! across threads.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};

#[derive(Debug, Clone)]
pub struct RandomStream {
    seed: u64,
    index: u64,
    rng: ChaCha8Rng,
}

/// The stream for sample `index` under root `seed`.
pub fn derive_substream(seed: u64, index: u64) -> RandomStream {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    RandomStream { seed, index, rng }
}

/// SplitMix64 finalizer over `seed` and `tag`; used to derive independent
/// root seeds (e.g. one per side of an inequality, one per sweep cell).
pub fn mix_seed(seed: u64, tag: u64) -> u64 {
    let mut z = seed ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(0x6A09_E667_F3BC_C909);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl RandomStream {
    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn index(&self) -> u64 {
        self.index
    }

    /// Number of 32-bit words consumed so far.
    pub fn counter(&self) -> u128 {
        self.rng.get_word_pos()
    }

    /// Uniform on `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    pub fn normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    /// Standard exponential.
    pub fn exponential(&mut self) -> f64 {
        self.rng.sample(Exp1)
    }
}

impl RngCore for RandomStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}
