//! Deterministic seed derivation for stochastic pipeline stages.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

/// Generator used by every stochastic stage; stable across platforms.
pub type StageRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> StageRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Hashes `(global, env_id, stage)` into a 64-bit stage seed.
pub fn derive_seed(global: u64, env_id: &str, stage: &str) -> u64 {
    let mut h = Sha256::new();
    h.update(global.to_le_bytes());
    h.update((env_id.len() as u64).to_le_bytes());
    h.update(env_id.as_bytes());
    h.update(stage.as_bytes());
    let digest = h.finalize();
    let mut bytes = [0u8; 8];
    bytes.copy_from_slice(&digest[..8]);
    u64::from_le_bytes(bytes)
}
