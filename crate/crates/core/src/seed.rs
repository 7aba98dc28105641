//! Seed derivation.
//!
//! Every random stream in the crate is keyed by a 64-bit seed derived from a
//! base seed and a stable identifier, never by worker or thread order. The
//! mixing function is SplitMix64's finalizer; text identifiers are first
//! reduced with 64-bit FNV-1a.

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;
const FNV_OFFSET: u64 = 0xCBF2_9CE4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01B3;

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Child seed for stream `index` of `seed`: `mix64(seed + (index + 1) * φ)`.
pub fn derive(seed: u64, index: u64) -> u64 {
    mix64(seed.wrapping_add(index.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)))
}

/// 64-bit FNV-1a of a string.
pub fn fnv1a(text: &str) -> u64 {
    text.bytes().fold(FNV_OFFSET, |h, b| (h ^ u64::from(b)).wrapping_mul(FNV_PRIME))
}

/// Seed for a named item (clip id, synthetic kind) under a base seed.
pub fn derive_named(seed: u64, name: &str) -> u64 {
    derive(seed, fnv1a(name))
}
