//! Seeded, platform-independent randomness.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

pub fn seeded(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Derives an independent stream for a named sub-task, so that adding a consumer
/// of randomness in one stage never perturbs another stage.
pub fn derive(seed: u64, stream: u64) -> Rng {
    // splitmix64 finalizer over the pair
    let mut z = seed ^ stream.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^= z >> 31;
    ChaCha8Rng::seed_from_u64(z)
}

pub mod streams {
    pub const SPLIT: u64 = 1;
    pub const TRAIN: u64 = 2;
    pub const FEW_SHOT: u64 = 3;
    pub const DEM: u64 = 4;
    pub const FOLDS: u64 = 5;
}
