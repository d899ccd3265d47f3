//! Seeded randomness.
//!
//! Every random choice in the crate is driven by [`DlpRng`], which is ChaCha8
//! (from `rand_chacha`) seeded through `SeedableRng::seed_from_u64`. Results
//! are therefore bit-reproducible for a given 64-bit seed on any platform.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type DlpRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> DlpRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// SplitMix64 finaliser.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Folds a sequence of words into one seed. Order-sensitive and stable
/// across releases, unlike `std::hash`.
pub fn derive_seed(parts: &[u64]) -> u64 {
    parts.iter().fold(0x6a09_e667_f3bc_c908, |acc, &p| mix64(acc ^ mix64(p)))
}

/// Seed for one of several independent streams derived from a master seed.
pub fn stream_seed(seed: u64, stream: u64) -> u64 {
    derive_seed(&[seed, stream])
}
