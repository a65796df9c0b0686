//! Seeding conventions.
//!
//! Every stochastic routine takes an explicit `u64` seed and builds a
//! [`ChaCha8Rng`] from it with [`SeedableRng::seed_from_u64`]. Seeds for
//! sub-streams (trials, arms, tie-breaks, noise) are derived with
//! [`derive_seed`], which is injective in its `(stream, index)` arguments for
//! a fixed base seed.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// SplitMix64 finalizer. A bijection on `u64`.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Sub-stream tags. Values must stay below 16.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u64)]
pub enum Stream {
    NullArm = 1,
    AltArm = 2,
    Calibration = 3,
    TieBreak = 4,
    Noise = 5,
    Corpus = 6,
    Sweep = 7,
}

/// Derives the seed of sub-stream `stream` at position `index`.
///
/// `index` must be below 2^60. For fixed `base`, distinct `(stream, index)`
/// pairs map to distinct seeds.
pub fn derive_seed(base: u64, stream: Stream, index: u64) -> u64 {
    debug_assert!(index < 1 << 60);
    let tag = (index << 4) | stream as u64;
    mix64(base.wrapping_add(mix64(tag)))
}
