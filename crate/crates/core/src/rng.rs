//! Deterministic random streams.
//!
//! Every random object in the crate is generated from a 64-bit seed. Seeds
//! for sub-tasks (one sample set, one trial, one Monte Carlo block) are
//! derived from a master seed and a list of integer keys by chaining the
//! SplitMix64 finalizer:
//!
//! ```text
//! h = mix(master ^ 0x6a09e667f3bcc909)
//! for k in keys: h = mix(h ^ mix(k + 0x9e3779b97f4a7c15))
//! ```
//!
//! where `mix` is the SplitMix64 output function. A stream for a seed is a
//! ChaCha8 generator (`rand_chacha::ChaCha8Rng::seed_from_u64`), so a
//! derived stream depends only on its keys and never on scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Generator used for every stream in the crate.
pub type Stream = ChaCha8Rng;

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

/// SplitMix64 output function.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives a sub-seed from `master` and an ordered list of keys.
pub fn derive_seed(master: u64, keys: &[u64]) -> u64 {
    let mut h = mix64(master ^ 0x6a09_e667_f3bc_c909);
    for &k in keys {
        h = mix64(h ^ mix64(k.wrapping_add(GOLDEN)));
    }
    h
}

/// Opens the stream for a seed.
pub fn stream(seed: u64) -> Stream {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Stable 64-bit tag for a short label, used as a derivation key.
pub fn label_key(label: &str) -> u64 {
    // FNV-1a
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in label.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}
