//! Deterministic seed derivation.
//!
//! A task seed is the first 8 bytes (little endian) of
//! `SHA-256(master_le || tag_len_le || tag || part_0_le || part_1_le || ...)`,
//! where every integer is a `u64` and `tag` names the task kind. Hashing the
//! whole tuple keeps streams for distinct `(network, model, replicate, probe)`
//! tuples apart.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

pub type TaskRng = ChaCha8Rng;

pub fn derive_seed(master: u64, tag: &str, parts: &[u64]) -> u64 {
    let mut hasher = Sha256::new();
    hasher.update(master.to_le_bytes());
    hasher.update((tag.len() as u64).to_le_bytes());
    hasher.update(tag.as_bytes());
    for p in parts {
        hasher.update(p.to_le_bytes());
    }
    let digest = hasher.finalize();
    let mut bytes = [0u8; 8];
    bytes.copy_from_slice(&digest[..8]);
    u64::from_le_bytes(bytes)
}

/// Stable 64-bit identifier for a string (network name, model id).
pub fn name_id(name: &str) -> u64 {
    derive_seed(0, name, &[])
}

pub fn rng_from_seed(seed: u64) -> TaskRng {
    ChaCha8Rng::seed_from_u64(seed)
}
