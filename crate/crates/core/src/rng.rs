//! Seeded random streams with keyed substreams.
//!
//! Every replicate of an experiment draws from its own generator derived
//! from `(seed, key)`, so results do not depend on the order in which
//! replicates are scheduled.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The generator type used throughout the crate.
pub type Rng = ChaCha8Rng;

/// Root of a family of independent, reproducible random streams.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeedStream {
    seed: u64,
}

impl SeedStream {
    pub fn new(seed: u64) -> Self {
        SeedStream { seed }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// The generator for the stream root itself.
    pub fn rng(&self) -> Rng {
        Rng::seed_from_u64(self.seed)
    }

    /// Seed of the substream identified by `key`.
    pub fn derive(&self, key: &[u64]) -> u64 {
        let mut h = splitmix64(self.seed ^ 0x5bd1_e995_7f4a_7c15);
        for (i, &k) in key.iter().enumerate() {
            h = splitmix64(h ^ splitmix64(k.wrapping_add(i as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15)));
        }
        h
    }

    /// Generator for the substream identified by `key`.
    pub fn substream(&self, key: &[u64]) -> Rng {
        Rng::seed_from_u64(self.derive(key))
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Rng from a plain seed.
pub fn seeded(seed: u64) -> Rng {
    Rng::seed_from_u64(seed)
}
