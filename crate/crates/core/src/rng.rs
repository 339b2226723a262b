//! Deterministic seed derivation.
//!
//! Every random choice in the crate is drawn from ChaCha8 seeded with a 64-bit
//! value. Sub-seeds for pipeline stages are derived by hashing the master seed
//! together with a stage label and a list of indices (FNV-1a), so any stage of
//! a run can be reproduced in isolation from the master seed alone.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Identifier of the PRNG recorded in output metadata.
pub const PRNG_ALGORITHM: &str = "chacha8";

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

fn fnv1a_extend(mut hash: u64, bytes: &[u8]) -> u64 {
    for &b in bytes {
        hash ^= u64::from(b);
        hash = hash.wrapping_mul(FNV_PRIME);
    }
    hash
}

/// Derive a sub-seed from a master seed, a stage label and indices.
pub fn derive_seed(master: u64, label: &str, indices: &[u64]) -> u64 {
    let mut hash = fnv1a_extend(FNV_OFFSET, &master.to_le_bytes());
    hash = fnv1a_extend(hash, label.as_bytes());
    for &index in indices {
        hash = fnv1a_extend(hash, &index.to_le_bytes());
    }
    hash
}

/// ChaCha8 generator for a derived stream.
pub fn stream_rng(master: u64, label: &str, indices: &[u64]) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(master, label, indices))
}

/// ChaCha8 generator seeded directly with `seed`.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
