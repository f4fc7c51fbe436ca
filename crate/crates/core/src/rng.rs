//! Seeded randomness shared by every module.
//!
//! All sampling goes through ChaCha8 (`rand_chacha`) seeded with
//! `seed_from_u64`, so a given seed produces the same stream on every
//! platform. Sub-streams are keyed by hashing the parent seed together with
//! string labels (SHA-256, first 8 bytes little-endian), which keeps parallel
//! and serial runs identical.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

pub type Rng = ChaCha8Rng;

pub fn seeded(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Derives a child seed from `seed` and an ordered list of labels.
pub fn derive_seed(seed: u64, labels: &[&str]) -> u64 {
    let mut hasher = Sha256::new();
    hasher.update(seed.to_le_bytes());
    for label in labels {
        hasher.update((label.len() as u64).to_le_bytes());
        hasher.update(label.as_bytes());
    }
    let digest = hasher.finalize();
    let mut bytes = [0u8; 8];
    bytes.copy_from_slice(&digest[..8]);
    u64::from_le_bytes(bytes)
}
