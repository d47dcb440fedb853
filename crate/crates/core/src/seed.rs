//! Named seed derivation.
//!
//! Every random component derives its own seed from the single master seed
//! through `(label, index)`, so adding or reordering components never
//! perturbs the streams of the others, and parallel and serial execution
//! draw identical numbers.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

/// Derive a child seed from `(master, label, index)`.
///
/// SHA-256 based so the mapping is stable across platforms and releases.
pub fn derive_seed(master: u64, label: &str, index: u64) -> u64 {
    let mut hasher = Sha256::new();
    hasher.update(master.to_le_bytes());
    hasher.update([0xff]);
    hasher.update(label.as_bytes());
    hasher.update([0xff]);
    hasher.update(index.to_le_bytes());
    let digest = hasher.finalize();
    u64::from_le_bytes(digest[..8].try_into().unwrap())
}

/// A deterministic RNG for the component named `(label, index)`.
pub fn component_rng(master: u64, label: &str, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(master, label, index))
}
