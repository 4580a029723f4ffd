//! Derivation of independent RNG substreams.
//!
//! Parallel work (table rows, simulation replicates) seeds each unit from
//! `mix_seed(master, index)` so results never depend on scheduling order.

/// splitmix64-style mix of a master seed and a stream index.
pub(crate) fn mix_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
