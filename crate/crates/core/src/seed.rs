//! Seed derivation for reproducible random streams.
//!
//! Every random decision in the crate is drawn from a `ChaCha8Rng` whose seed
//! is a pure function of a master seed and a few integer coordinates (round,
//! vertex, grid point, sample, ...). Results therefore do not depend on the
//! order in which independent jobs are executed.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The generator used throughout the crate.
pub type Rng = ChaCha8Rng;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Folds a sequence of words into one well-mixed 64-bit seed.
pub fn mix(words: &[u64]) -> u64 {
    words
        .iter()
        .fold(0x6A09_E667_F3BC_C908, |acc, &w| splitmix64(acc ^ splitmix64(w)))
}

/// Creates the generator for a seed.
pub fn rng_from(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Creates the generator for a derived substream.
pub fn substream(words: &[u64]) -> Rng {
    rng_from(mix(words))
}
