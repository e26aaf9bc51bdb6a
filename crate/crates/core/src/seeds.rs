//! Counter-based seed derivation and a stable 64-bit content hash.
//!
//! Every stochastic event in a run (a rollout, a harness call, an eval
//! sample) gets its seed as a pure function of the run seed and its
//! coordinates, so resuming or reordering work cannot change outcomes.

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

fn splitmix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derive an independent seed from `seed` and a stream index.
pub fn split_seed(seed: u64, index: u64) -> u64 {
    splitmix64(seed.wrapping_add(index.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)))
}

/// Derive a seed from a run seed and a list of coordinates (step, instance,
/// sample, ...).
pub fn derive_seed(seed: u64, coords: &[u64]) -> u64 {
    let mut s = seed;
    for &c in coords {
        s = split_seed(s, c);
    }
    s
}

/// FNV-1a; stable across platforms and releases, unlike the std hasher.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}
