//! Deterministic, splittable random-number streams.
//!
//! Every simulator derives an independent ChaCha stream from a
//! `(seed, stream, index)` triple, so per-realisation loops can run in any
//! order (or in parallel) without changing the output.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Stream tag for innovation noise.
pub(crate) const STREAM_NOISE: u64 = 1;
/// Stream tag for the shared random-effect draw.
pub(crate) const STREAM_RANDOM_EFFECT: u64 = 2;

/// splitmix64 step (Steele, Lea & Flood); used purely as a key mixer.
fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mixes a `(seed, stream, index)` triple into a single well-spread word.
pub(crate) fn mix(seed: u64, stream: u64, index: u64) -> u64 {
    let mut state = seed;
    let a = splitmix64(&mut state);
    state ^= stream.wrapping_mul(0xA24B_AED4_963E_E407);
    let b = splitmix64(&mut state);
    state ^= index.wrapping_mul(0x9FB2_1C65_1E98_DF25);
    let c = splitmix64(&mut state);
    a ^ b.rotate_left(23) ^ c.rotate_left(46)
}

/// Derives the ChaCha generator for one sub-stream.
pub(crate) fn substream(seed: u64, stream: u64, index: u64) -> ChaCha8Rng {
    let mut state = mix(seed, stream, index);
    let mut key = [0u8; 32];
    for chunk in key.chunks_exact_mut(8) {
        chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
    }
    ChaCha8Rng::from_seed(key)
}
