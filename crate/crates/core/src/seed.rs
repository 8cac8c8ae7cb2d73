//! Seed mixing. Every random stream in the crate is a ChaCha8 generator keyed
//! by a 64-bit value derived here, so any single sample can be re-created from
//! its base seed and indices alone.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// SplitMix64 finalizer.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Hash of an index tuple, order sensitive.
pub fn hash_indices(indices: &[u64]) -> u64 {
    let mut h = 0x6A09_E667_F3BC_C908u64;
    for &i in indices {
        h = splitmix64(h ^ i);
    }
    h
}

/// `base ⊕ hash(indices)`.
pub fn mix(base: u64, indices: &[u64]) -> u64 {
    base ^ hash_indices(indices)
}

/// Generator for the named substream of `seed`.
pub fn stream(seed: u64, tag: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(splitmix64(seed ^ splitmix64(tag)))
}

pub(crate) mod tags {
    pub const DEGREES: u64 = 1;
    pub const MATCHING: u64 = 2;
    pub const LANCZOS: u64 = 3;
    pub const PD_INIT: u64 = 4;
    pub const PD_SWEEP: u64 = 5;
    pub const PD_FUNCTIONAL: u64 = 6;
}
