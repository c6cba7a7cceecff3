//! Named random substreams fanned out from one master seed.
//!
//! Every stochastic stage draws from its own stream, keyed by a name and an
//! index (`blobgen/17`, `placement/3`, ...). Adding a stage or changing how
//! many draws one stage makes never shifts the numbers another stage sees,
//! and parallel workers produce the same output as a serial run.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

pub const BLOBGEN: &str = "blobgen";
pub const PRIOR: &str = "prior";
pub const PLACEMENT: &str = "placement";
pub const BASELINE: &str = "baseline";
pub const PRIOR_FIT: &str = "prior_fit";
pub const DEMO: &str = "demo";

/// 256-bit key for stream `(name, index)` under `master`.
pub fn stream_key(master: u64, name: &str, index: u64) -> [u8; 32] {
    let mut hasher = Sha256::new();
    hasher.update(master.to_le_bytes());
    hasher.update((name.len() as u64).to_le_bytes());
    hasher.update(name.as_bytes());
    hasher.update(index.to_le_bytes());
    hasher.finalize().into()
}

pub fn stream_rng(master: u64, name: &str, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::from_seed(stream_key(master, name, index))
}

/// A 64-bit seed for APIs that take an integer (e.g. Perlin permutations).
pub fn stream_seed(master: u64, name: &str, index: u64) -> u64 {
    let key = stream_key(master, name, index);
    u64::from_le_bytes(key[..8].try_into().expect("8-byte slice"))
}
