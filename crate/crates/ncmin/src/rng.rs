//! Seed derivation helpers. Every random decision in the crate flows from a
//! user-supplied `u64` seed through these mixers, so runs are reproducible
//! and independent subsystems get independent streams.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Finalizer from the splitmix64 generator. Bijective on `u64`.
pub(crate) fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Folds a tag sequence into one well-mixed 64-bit key.
pub(crate) fn mix(parts: &[u64]) -> u64 {
    let mut acc = 0x243f_6a88_85a3_08d3u64; // arbitrary non-zero start
    for &p in parts {
        acc = splitmix64(acc ^ p);
    }
    acc
}

/// Deterministic substream: same `(seed, tags)` always yields the same RNG,
/// different tags yield statistically independent ones.
pub(crate) fn substream(seed: u64, tags: &[u64]) -> ChaCha8Rng {
    let mut parts = Vec::with_capacity(tags.len() + 1);
    parts.push(seed);
    parts.extend_from_slice(tags);
    ChaCha8Rng::seed_from_u64(mix(&parts))
}
