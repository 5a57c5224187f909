//! Small seeded-hash helpers shared by the random policy, the tuner, and the
//! evolution loop.
//!
//! Everything here is a pure function of its integer inputs, so identical
//! seeds reproduce identical streams on every platform.

/// SplitMix64 finalizer: a single avalanche step over a 64-bit state.
pub fn splitmix64(state: u64) -> u64 {
    let mut z = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives an independent stream seed from a base seed and a salt
/// (e.g. an iteration or node counter).
pub fn derive_seed(seed: u64, salt: u64) -> u64 {
    splitmix64(seed ^ splitmix64(salt.wrapping_add(0x51_7c_c1_b7_27_22_0a_95)))
}

/// Maps a hash to a float in `[0, 1)` using the top 53 bits.
pub fn unit_f64(hash: u64) -> f64 {
    (hash >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Counter-based uniform draw in `[0, 1)`: pure in `(seed, counters...)`.
pub fn counter_uniform(seed: u64, a: u64, b: u64) -> f64 {
    unit_f64(splitmix64(seed ^ splitmix64(a ^ 0xd6e8_feb8_6659_fd93) ^ splitmix64(b.wrapping_mul(0xa24b_aed4_963e_e407))))
}

/// FNV-1a over a byte slice: stable content fingerprint for manifests and
/// island assignment.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}
