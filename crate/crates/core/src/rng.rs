//! Seed derivation and deterministic random streams.
//!
//! Derived seeds use the SplitMix64 finalizer:
//!
//! ```text
//! splitmix64(x) = fmix(x + 0x9E3779B97F4A7C15)
//! mix_seed(a, b) = splitmix64(a ^ splitmix64(b))
//! ```
//!
//! Random streams are ChaCha8 keyed by a seed with the 64-bit stream id selecting
//! an independent substream.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

pub const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// Human-readable statement of [`mix_seed`], written into experiment outputs.
pub const SEED_MIX_DESCRIPTION: &str =
    "splitmix64(x)=fmix64(x+0x9E3779B97F4A7C15); mix(a,b)=splitmix64(a^splitmix64(b)); seed=mix(mix(base,point),realization)";

pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(GOLDEN_GAMMA);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn mix_seed(a: u64, b: u64) -> u64 {
    splitmix64(a ^ splitmix64(b))
}

/// Seed of one experiment cell.
pub fn cell_seed(base: u64, point: usize, realization: usize) -> u64 {
    mix_seed(mix_seed(base, point as u64), realization as u64)
}

pub fn stream(seed: u64, stream_id: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream_id);
    rng
}

/// Stream used for vocabulary assignment.
pub fn vocabulary_stream(seed: u64) -> StreamRng {
    stream(seed, 0)
}

/// Per-document substream; independent of how documents are scheduled.
pub fn document_stream(seed: u64, doc: usize) -> StreamRng {
    stream(seed, doc as u64 + 1)
}
