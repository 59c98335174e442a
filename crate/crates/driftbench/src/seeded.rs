//! Named, independent random substreams.
//!
//! Reproducibility here means more than a fixed seed: corpus problems are
//! generated in parallel and the scripted agent must behave identically
//! whatever method or worker count is in play. Each consumer therefore
//! derives its own stream by hashing a label plus identifying fields, so no
//! draw order couples one problem (or one turn) to another.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

/// Hash the labelled parts into a 32-byte RNG seed.
pub(crate) fn derive_seed(label: &str, parts: &[&[u8]]) -> [u8; 32] {
    let mut hasher = Sha256::new();
    hasher.update(label.as_bytes());
    for part in parts {
        hasher.update((part.len() as u64).to_le_bytes());
        hasher.update(part);
    }
    hasher.finalize().into()
}

/// A fresh deterministic generator for the labelled stream.
pub(crate) fn stream_rng(label: &str, parts: &[&[u8]]) -> ChaCha8Rng {
    ChaCha8Rng::from_seed(derive_seed(label, parts))
}

/// First eight bytes of the stream seed as an integer, for stable ranking.
pub(crate) fn stream_hash(label: &str, parts: &[&[u8]]) -> u64 {
    let seed = derive_seed(label, parts);
    u64::from_le_bytes(seed[..8].try_into().unwrap())
}

/// Lowercase hex SHA-256 of `bytes`, for content fingerprints.
pub(crate) fn hex_digest(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    hasher.finalize().iter().map(|b| format!("{b:02x}")).collect()
}
