//! Counter-based random streams.
//!
//! Every random quantity in a run is addressed by a tuple of words (a domain
//! tag, the master seed, an iteration, a category, a slot ...) that is hashed
//! with splitmix64. Two runs that ask for the same address get the same
//! number, which is what lets paired policy runs share bundle draws.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Domain tags keep the streams of different subsystems disjoint.
pub mod tag {
    pub const BUNDLE: u64 = 0x4255_4e44_4c45; // "BUNDLE"
    pub const SELECT: u64 = 0x5345_4c45_4354; // "SELECT"
    pub const POOL: u64 = 0x504f_4f4c; // "POOL"
    pub const PARAMS: u64 = 0x5041_5241_4d53; // "PARAMS"
}

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

#[inline]
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(GOLDEN_GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Hashes an address into a single 64-bit key.
pub fn stream_key(parts: &[u64]) -> u64 {
    parts
        .iter()
        .fold(GOLDEN_GAMMA, |h, &w| splitmix64(h ^ splitmix64(w)))
}

/// Maps a key to `0..n` by multiply-shift. Bias is below `n / 2^64`.
#[inline]
pub fn uniform_index(key: u64, n: usize) -> usize {
    debug_assert!(n > 0);
    ((key as u128 * n as u128) >> 64) as usize
}

/// A full PRNG seeded from an address, for consumers that need many draws
/// (Beta sampling, subset sampling).
pub fn keyed_rng(parts: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(stream_key(parts))
}
