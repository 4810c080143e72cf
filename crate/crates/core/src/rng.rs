//! Counter-based random draws.
//!
//! Every draw is a pure function of `(seed, stream, index)`: stream is the
//! particle id, index the step or draw counter. Nothing is stateful, so
//! particle loops can run in any order, on any number of threads, and still
//! produce bit-identical results for a given seed.

use crate::scalar::{cast, Scalar};

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer; a well-mixed 64-bit permutation.
#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Word `word` of the draw keyed by `(seed, stream, index)`.
#[inline]
fn keyed_word(seed: u64, stream: u64, index: u64, word: u64) -> u64 {
    let h = mix64(seed.wrapping_add(GOLDEN));
    let h = mix64(h ^ stream.wrapping_mul(0xBF58_476D_1CE4_E5B9));
    let h = mix64(h ^ index.wrapping_mul(0x94D0_49BB_1331_11EB));
    mix64(h.wrapping_add(word.wrapping_mul(GOLDEN)))
}

/// Maps a u64 onto the open interval (0, 1) with 53-bit resolution.
#[inline]
fn to_unit_open(x: u64) -> f64 {
    ((x >> 11) as f64 + 0.5) * (1.0 / 9_007_199_254_740_992.0)
}

/// Uniform draw on (0, 1), never exactly 0 or 1.
#[inline]
pub fn uniform<S: Scalar>(seed: u64, stream: u64, index: u64) -> S {
    cast(to_unit_open(keyed_word(seed, stream, index, 0)))
}

/// Standard normal draw via Box-Muller on two keyed uniforms.
#[inline]
pub fn standard_normal<S: Scalar>(seed: u64, stream: u64, index: u64) -> S {
    let u1 = to_unit_open(keyed_word(seed, stream, index, 0));
    let u2 = to_unit_open(keyed_word(seed, stream, index, 1));
    let r = (-2.0 * u1.ln()).sqrt();
    cast(r * (2.0 * std::f64::consts::PI * u2).cos())
}
