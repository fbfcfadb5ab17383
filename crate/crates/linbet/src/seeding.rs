//! Seed-stream derivation.
//!
//! All randomness flows from a single root seed. Substreams are derived by
//! hashing the root seed with structured indices (repetition, round), so that
//! repetitions can run in parallel and two algorithms compared under the same
//! root seed see the same noise stream at the same round index.

use rand_chacha::ChaCha8Rng;
use rand_chacha::rand_core::SeedableRng;

/// SplitMix64 finalizer. Bijective on u64, good avalanche behavior.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derive a child seed from a root seed and one index.
pub fn derive_seed(root: u64, index: u64) -> u64 {
    mix(mix(root) ^ mix(index.wrapping_add(1)))
}

/// Derive a child seed from a root seed and two indices (e.g. repetition, round).
pub fn derive_seed2(root: u64, a: u64, b: u64) -> u64 {
    mix(derive_seed(root, a) ^ mix(b.wrapping_add(0x5851_f42d_4c95_7f2d)))
}

/// RNG for one repetition.
pub fn rep_rng(root: u64, rep: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(root, rep))
}

/// RNG for one (repetition, round) payoff draw. Deriving a fresh generator per
/// round keeps the noise stream aligned across algorithms that consume
/// different numbers of uniforms per decision.
pub fn round_rng(root: u64, rep: u64, round: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed2(root, rep, round))
}
