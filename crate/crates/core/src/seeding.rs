//! Deterministic seed derivation.
//!
//! All randomness in the crate flows from one root seed. Each consumer
//! (split, oversample, per-tree bootstrap, per-pattern generation) derives
//! its own stream with [`derive_seed`], so partial reruns stay reproducible
//! and streams never alias.

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives a child seed from `root` for the named `stream` and `index`.
pub fn derive_seed(root: u64, stream: &str, index: u64) -> u64 {
    // FNV-1a over the stream tag keeps distinct names on distinct streams.
    let mut tag: u64 = 0xcbf2_9ce4_8422_2325;
    for b in stream.bytes() {
        tag ^= u64::from(b);
        tag = tag.wrapping_mul(0x0000_0100_0000_01b3);
    }
    splitmix64(root ^ tag ^ index.wrapping_mul(0x9e37_79b9_7f4a_7c15))
}
