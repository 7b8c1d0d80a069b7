//! Counter-based random streams.
//!
//! Every stream is identified by `(seed, channel)` and positioned by a tick
//! counter, so the value drawn for a given tick does not depend on how many
//! draws other components made before it.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives a child seed from a parent seed, a component tag and an index.
pub fn derive_seed(seed: u64, component: &str, index: u64) -> u64 {
    let mut h = mix64(seed);
    for byte in component.bytes() {
        h = mix64(h ^ u64::from(byte));
    }
    mix64(h ^ index.wrapping_mul(0xD6E8_FEB8_6659_FD93))
}

/// A ChaCha stream seeded by `(seed, channel)`.
#[derive(Debug, Clone)]
pub struct Stream {
    rng: ChaCha8Rng,
}

impl Stream {
    pub fn new(seed: u64, channel: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(channel);
        Self { rng }
    }

    /// Stream positioned at the block reserved for `tick`.
    pub fn at_tick(seed: u64, channel: u64, tick: u64) -> Self {
        let mut s = Self::new(seed, channel);
        s.rng.set_word_pos(u128::from(tick) * 64);
        s
    }

    pub fn normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    pub fn gaussian(&mut self, mean: f64, sigma: f64) -> f64 {
        mean + sigma * self.normal()
    }

    /// Uniform in `[lo, hi)`.
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.rng.random::<f64>()
    }

    pub fn below(&mut self, n: usize) -> usize {
        self.rng.random_range(0..n)
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }
}

/// One standard-normal draw for `(seed, channel, tick)`.
pub fn normal_at(seed: u64, channel: u64, tick: u64) -> f64 {
    Stream::at_tick(seed, channel, tick).normal()
}
