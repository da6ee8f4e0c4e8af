//! Hierarchical seed derivation.
//!
//! A stream is addressed by the root seed and a path of integers, e.g.
//! `[OUTER, i, FEATURES, j]`. Each path component is folded in with a
//! SplitMix64 finalizer, and the result seeds a ChaCha8 generator.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const TEACHER: u64 = 1;
pub const INPUTS: u64 = 2;
pub const NOISE: u64 = 3;
pub const FEATURES: u64 = 4;
pub const COVARIATE: u64 = 5;
pub const TEST: u64 = 6;
pub const TRACE: u64 = 7;
pub const DECOMPOSITION: u64 = 8;
pub const RUN: u64 = 9;

fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

pub fn derive(root: u64, path: &[u64]) -> u64 {
    path.iter().fold(mix(root), |acc, &p| mix(acc ^ mix(p)))
}

pub fn stream(root: u64, path: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive(root, path))
}
