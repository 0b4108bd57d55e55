//! Seed derivation.
//!
//! Every per-record seed is `mix64(master, index)`, built on the SplitMix64
//! finalizer (Steele, Lea and Flood, 2014). Records can therefore be produced
//! in any order or in parallel and still come out identical.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 output finalizer.
pub fn finalize64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derive the seed of stream `index` under `master`.
///
/// Equivalent to the `index + 1`-th SplitMix64 output of a generator whose
/// state starts at `finalize64(master)`.
pub fn mix64(master: u64, index: u64) -> u64 {
    finalize64(finalize64(master).wrapping_add(index.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)))
}

/// Portable, reproducible generator for a seed.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finalizer_matches_reference_splitmix64() {
        // First outputs of SplitMix64 seeded with 0 (reference C implementation).
        let mut state = 0u64;
        let mut next = || {
            state = state.wrapping_add(GOLDEN_GAMMA);
            finalize64(state)
        };
        assert_eq!(next(), 0xE220_A839_7B1D_CDAF);
        assert_eq!(next(), 0x6E78_9E6A_A1B9_65F4);
        assert_eq!(next(), 0x06C4_5D18_8009_454F);
    }

    #[test]
    fn mix64_separates_streams() {
        let a: Vec<u64> = (0..1000).map(|i| mix64(42, i)).collect();
        let mut sorted = a.clone();
        sorted.sort_unstable();
        sorted.dedup();
        assert_eq!(sorted.len(), a.len());
        assert_ne!(mix64(42, 0), mix64(43, 0));
        assert_eq!(mix64(7, 3), mix64(7, 3));
    }
}
