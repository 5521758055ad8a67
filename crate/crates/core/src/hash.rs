//! Stable 64-bit hashing used for penetration selection and RNG substreams.
//!
//! `hash64(seed, key)` is FNV-1a over the little-endian bytes of `seed`
//! followed by the UTF-8 bytes of `key`, passed through the SplitMix64
//! finalizer. The definition is part of the output format: changing it
//! changes which vehicles a given seed selects.

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

/// SplitMix64 output function.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn fnv1a(mut state: u64, bytes: &[u8]) -> u64 {
    for &b in bytes {
        state ^= u64::from(b);
        state = state.wrapping_mul(FNV_PRIME);
    }
    state
}

pub fn hash64(seed: u64, key: &str) -> u64 {
    let state = fnv1a(FNV_OFFSET, &seed.to_le_bytes());
    mix64(fnv1a(state, key.as_bytes()))
}

/// Maps a hash to `[0, 1)` using its top 53 bits.
pub fn unit_interval(h: u64) -> f64 {
    (h >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Derives an independent stream key from a seed and a tuple of indices.
pub fn substream(seed: u64, parts: &[u64]) -> u64 {
    parts.iter().fold(mix64(seed), |acc, &p| mix64(acc ^ mix64(p)))
}
