//! Keyed counter hashing.
//!
//! Every random quantity is `mix64(key + (counter + 1) * GOLDEN)`, i.e. the
//! `counter`-th output of a SplitMix64 stream seeded with `key`. Draws are
//! pure functions of `(key, counter)`, so they can be evaluated in any order
//! and on any thread.

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Key of the stream labelled `tag` under `seed`.
pub fn stream_key(seed: u64, tag: u64) -> u64 {
    mix64(mix64(seed ^ 0x5851_F42D_4C95_7F2D) ^ mix64(tag.wrapping_add(0x14057B7EF767814F)))
}

#[inline]
pub fn draw_u64(key: u64, counter: u64) -> u64 {
    mix64(key.wrapping_add(counter.wrapping_add(1).wrapping_mul(GOLDEN)))
}

/// 53-bit uniform in `[0, 1)`.
#[inline]
pub fn draw_unit(key: u64, counter: u64) -> f64 {
    (draw_u64(key, counter) >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Seed of replica `index` under a master seed.
pub fn replica_seed(master: u64, index: u64) -> u64 {
    mix64(stream_key(master, 0xA5A5_0000) ^ draw_u64(master, index))
}
