//! Seeded random streams.
//!
//! Every sample path owns independent streams derived from
//! `(master_seed, label, path_index)`. The derivation does not depend on the
//! testing policy, so runs that differ only in policy share their
//! initialization and spread draws (common random numbers).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Stream used for initialization and the infection spread phase.
pub const DYNAMICS_STREAM: u64 = 0x5EED_0001;
/// Stream used for the random choices made by testing policies.
pub const TESTING_STREAM: u64 = 0x5EED_0002;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Deterministic pseudorandom stream backed by ChaCha8.
#[derive(Debug, Clone)]
pub struct RngStream {
    inner: ChaCha8Rng,
}

impl RngStream {
    pub fn from_seed(seed: u64) -> Self {
        Self {
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Stream for `(master_seed, label, path_index)`.
    pub fn derive(master_seed: u64, label: u64, path_index: u64) -> Self {
        let key = splitmix64(master_seed ^ splitmix64(label));
        let mut inner = ChaCha8Rng::seed_from_u64(key);
        inner.set_stream(path_index);
        Self { inner }
    }

    /// Uniform integer in `0..bound`. Panics if `bound == 0`.
    pub fn uniform_below(&mut self, bound: usize) -> usize {
        assert!(bound > 0, "uniform_below requires a positive bound");
        // sampled as u64 so the draw sequence does not depend on pointer width
        self.inner.random_range(0..bound as u64) as usize
    }

    pub fn bernoulli(&mut self, prob: f64) -> bool {
        if prob <= 0.0 {
            return false;
        }
        if prob >= 1.0 {
            return true;
        }
        self.inner.random::<f64>() < prob
    }

    /// Moves a uniform random `amount`-subset of `items` (in uniform random
    /// order) to the front of the slice.
    pub fn partial_shuffle<T>(&mut self, items: &mut [T], amount: usize) {
        let len = items.len();
        let amount = amount.min(len);
        for i in 0..amount {
            let j = i + self.uniform_below(len - i);
            items.swap(i, j);
        }
    }

    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        let len = items.len();
        self.partial_shuffle(items, len.saturating_sub(1));
    }
}
