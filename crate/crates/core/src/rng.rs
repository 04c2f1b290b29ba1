//! Deterministic RNG streams derived from a master seed.
//!
//! Workers never share an RNG: every independent unit of work (a walk, a
//! rewire stratum, a planted structure) gets its own stream derived from
//! `(seed, a, b)`, so output is identical regardless of how the work is
//! partitioned across threads.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// splitmix64 finalizer; good avalanche for combining small integers.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// RNG for the sub-stream `(a, b)` of `seed`.
pub fn stream_rng(seed: u64, a: u64, b: u64) -> ChaCha8Rng {
    let s = mix(seed ^ mix(a ^ mix(b)));
    ChaCha8Rng::seed_from_u64(s)
}
