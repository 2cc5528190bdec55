//! Deterministic random streams.
//!
//! Every independent unit of work (a node regression, a simulation replicate,
//! a posterior draw block) gets its own generator derived from a master seed
//! and an index, so results never depend on how work is scheduled.

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

pub type StreamRng = ChaCha20Rng;

/// Stream domains keep seeds for different purposes apart even when the same
/// master seed is reused.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    Node = 1,
    Replicate = 2,
    Posterior = 3,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Stable 64-bit hash of `(master, domain, index)`.
pub fn derive_seed(master: u64, domain: Domain, index: u64) -> u64 {
    let h = splitmix64(master ^ splitmix64(domain as u64));
    splitmix64(h ^ splitmix64(index.wrapping_add(0xD1B5_4A32_D192_ED03)))
}

pub fn stream(master: u64, domain: Domain, index: u64) -> StreamRng {
    StreamRng::seed_from_u64(derive_seed(master, domain, index))
}

pub fn seeded(seed: u64) -> StreamRng {
    StreamRng::seed_from_u64(seed)
}
