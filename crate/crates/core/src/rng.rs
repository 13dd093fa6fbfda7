//! Seed derivation.
//!
//! Every random quantity in an experiment is drawn from its own ChaCha stream
//! whose seed is a pure function of `(master seed, layout index, purpose)`.
//! Layouts can therefore be generated in any order, on any worker, and a run
//! can be resumed from any layout without replaying earlier ones.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// What a derived stream is used for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u64)]
pub enum Purpose {
    Deployment = 1,
    Shadowing = 2,
    Fading = 3,
    Clustering = 4,
    ApPositions = 5,
    UserPositions = 6,
}

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

/// SplitMix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives the seed of the `purpose` stream for layout `layout`.
pub fn derive_seed(master: u64, layout: u64, purpose: Purpose) -> u64 {
    let a = mix(master.wrapping_add(GOLDEN));
    let b = mix(a ^ layout
        .wrapping_mul(GOLDEN)
        .wrapping_add(0x6a09_e667_f3bc_c909));
    mix(b ^ (purpose as u64).wrapping_mul(0xd1b5_4a32_d192_ed03))
}

/// Derives a child seed from a single parent seed.
pub fn child_seed(parent: u64, purpose: Purpose) -> u64 {
    mix(mix(parent ^ GOLDEN) ^ (purpose as u64).wrapping_mul(0xd1b5_4a32_d192_ed03))
}

pub fn stream(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
