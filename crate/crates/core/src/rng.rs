//! Keyed random streams.
//!
//! A generator is derived from a hash of (domain, master seed, key, counter),
//! so the numbers drawn for one video never depend on which other videos were
//! processed before it or on which thread ran it. The generator itself is
//! ChaCha8, a counter-mode stream cipher.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

/// Deterministic generator for `(domain, seed, key, counter)`.
pub fn keyed_rng(domain: &str, seed: u64, key: &str, counter: u64) -> ChaCha8Rng {
    let mut h = Sha256::new();
    // length prefixes keep ("ab", "c") and ("a", "bc") apart
    h.update((domain.len() as u64).to_le_bytes());
    h.update(domain.as_bytes());
    h.update(seed.to_le_bytes());
    h.update(counter.to_le_bytes());
    h.update((key.len() as u64).to_le_bytes());
    h.update(key.as_bytes());
    let digest: [u8; 32] = h.finalize().into();
    ChaCha8Rng::from_seed(digest)
}

/// Derives a 64-bit child seed, e.g. one per generated video.
pub fn child_seed(seed: u64, key: &str, counter: u64) -> u64 {
    use rand::RngCore;
    keyed_rng("child-seed", seed, key, counter).next_u64()
}
