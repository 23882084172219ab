//! Seeded random streams.
//!
//! Every stochastic routine takes an explicit `&mut R: Rng`. Independent
//! trials draw from [`stream`], which maps `(master seed, index)` onto a
//! distinct ChaCha8 stream, so results never depend on the order in which
//! trials are scheduled.

use rand::SeedableRng;
pub use rand_chacha::ChaCha8Rng;

/// Random stream `index` of the family identified by `master_seed`.
pub fn stream(master_seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(index);
    rng
}

/// Derive a child seed, for components that need their own family of streams.
pub fn child_seed(master_seed: u64, label: u64) -> u64 {
    // splitmix64 finalizer
    let mut z = master_seed ^ label.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
