//! Seed derivation for reproducible trials.
//!
//! Every trial owns its own ChaCha stream keyed by `(seed, trial_index)`, so a
//! batch produces the same traces whether trials run serially or in parallel.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mix a base seed with a stream index.
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    splitmix64(splitmix64(seed) ^ splitmix64(stream.wrapping_add(0xA5A5_A5A5)))
}

pub fn rng_for(seed: u64, stream: u64) -> SimRng {
    SimRng::seed_from_u64(derive_seed(seed, stream))
}

/// Stream offsets so distinct consumers of one trial seed never overlap.
pub mod stream {
    pub const SENSOR: u64 = 1;
    pub const FORCE_TORQUE: u64 = 2;
    pub const FRAMES: u64 = 3;
    pub const SCENARIO: u64 = 4;
}
