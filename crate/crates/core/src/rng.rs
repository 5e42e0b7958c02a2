//! Counter-based random streams.
//!
//! Every random quantity in the crate is drawn from a ChaCha8 stream whose
//! key is a hash of the master seed and a path of labels (scenario,
//! replication, ...), and whose 64-bit stream id selects the role (coefficients,
//! common shocks, series `i`). No stream depends on how many numbers another
//! stream consumed, so results do not depend on evaluation order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// Stream id for AR coefficient draws.
pub const COEFFICIENTS: u64 = 0;
/// Stream id for the shared common shocks η(t).
pub const COMMON_SHOCKS: u64 = 1;
/// Stream id for the (b, c) weight draws.
pub const WEIGHTS: u64 = 2;
const SERIES_BASE: u64 = 1 << 32;

/// SplitMix64 finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives a child seed from a parent seed and a label.
pub fn derive_seed(parent: u64, label: u64) -> u64 {
    mix64(parent ^ mix64(label.wrapping_add(GOLDEN_GAMMA)))
}

/// Derives a seed from a path of labels, e.g. `[scenario, replication]`.
pub fn derive_path(master: u64, path: &[u64]) -> u64 {
    path.iter().fold(master, |s, &l| derive_seed(s, l))
}

/// Stream id of series `i`.
pub fn series_stream(i: usize) -> u64 {
    SERIES_BASE + i as u64
}

/// Opens stream `stream` under key `seed`.
pub fn stream(seed: u64, stream: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
