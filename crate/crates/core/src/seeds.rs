//! Seedable random generation.
//!
//! Every stochastic procedure in this crate is driven by ChaCha8, a fixed,
//! portable algorithm, so results are bit-reproducible across runs and
//! platforms given a seed. Parallel loops never share a generator: each
//! replicate derives its own independent stream from (base, index), which
//! makes results independent of scheduling.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// The generator used throughout the crate.
pub type Rng = ChaCha8Rng;

/// Generator for a bare seed.
pub fn rng_from_seed(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent generator for stream `index` of a base seed.
pub fn rng_stream(base: u64, index: u64) -> Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(base);
    rng.set_stream(index);
    rng
}

/// Draws a base seed from `rng` from which per-replicate streams are derived.
pub fn derive_base(rng: &mut impl RngCore) -> u64 {
    rng.next_u64()
}
