//! Seeded randomness.
//!
//! Every random draw in the crate comes from [`Rng`], which is ChaCha8 as
//! implemented by `rand_chacha`: a portable generator whose output stream
//! depends only on the 64-bit seed, not on platform or word size. Child
//! seeds are derived with [`derive_seed`], a SplitMix64 finalizer over the
//! parent seed and a list of indices, so any trial of any experiment can be
//! re-run in isolation.

use rand::SeedableRng;

pub type Rng = rand_chacha::ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> Rng {
    Rng::seed_from_u64(seed)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mixes `parent` with `path` into a new seed:
/// `h = splitmix64(parent)`, then `h = splitmix64(h ^ i)` for each `i`.
pub fn derive_seed(parent: u64, path: &[u64]) -> u64 {
    path.iter()
        .fold(splitmix64(parent), |h, &i| splitmix64(h ^ i))
}
