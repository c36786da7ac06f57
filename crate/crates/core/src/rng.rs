//! Reproducible random streams.
//!
//! Every random quantity in the crate is drawn from a [`SeededRng`], which is
//! a ChaCha8 block generator keyed by a 64-bit seed and positioned on one of
//! 2^64 independent streams. Bootstrap replication `b` always reads stream
//! `b`, so a replicate's value does not depend on which thread computed it.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A deterministic generator identified by `(seed, stream_id)`.
#[derive(Clone, Debug)]
pub struct SeededRng {
    seed: u64,
    stream_id: u64,
    inner: ChaCha8Rng,
}

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        Self::with_stream(seed, 0)
    }

    pub fn with_stream(seed: u64, stream_id: u64) -> Self {
        let mut key = [0u8; 32];
        let mut state = seed;
        for chunk in key.chunks_exact_mut(8) {
            chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
        }
        let mut inner = ChaCha8Rng::from_seed(key);
        inner.set_stream(stream_id);
        Self {
            seed,
            stream_id,
            inner,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// A fresh generator on another stream of the same seed.
    pub fn stream(&self, stream_id: u64) -> Self {
        Self::with_stream(self.seed, stream_id)
    }

    /// A generator whose seed is derived from this one's `(seed, stream_id)`
    /// and `index`; used for nesting (outer Monte Carlo rep, inner bootstrap).
    pub fn child(&self, index: u64) -> Self {
        Self::new(derive_seed(derive_seed(self.seed, self.stream_id), index))
    }
}

impl RngCore for SeededRng {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.inner.fill_bytes(dest)
    }

    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> Result<(), rand::Error> {
        self.inner.try_fill_bytes(dest)
    }
}

/// Mixes `index` into `seed` to produce a well-separated seed.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut state = seed ^ index.wrapping_mul(0xD1B5_4A32_D192_ED03);
    let a = splitmix64(&mut state);
    a ^ splitmix64(&mut state).rotate_left(17)
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
