use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// The random generator handed out by [`StreamKey::rng`].
pub type KeyedRng = ChaCha8Rng;

/// Identifies one independent random stream.
///
/// `master_seed` and `stream_id` form the ChaCha key; `task_id` is the
/// stream nonce. The whole variate sequence is a function of the key alone.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StreamKey {
    pub master_seed: u64,
    pub task_id: u64,
    pub stream_id: u32,
}

impl StreamKey {
    pub fn new(master_seed: u64, task_id: u64, stream_id: u32) -> Self {
        Self {
            master_seed,
            task_id,
            stream_id,
        }
    }

    /// Key for replicate `task_id` of a given simulation role; `attempt`
    /// selects a fresh sub-stream when a draw has to be redone.
    pub fn for_role(master_seed: u64, role: StreamRole, task_id: u64, attempt: u32) -> Self {
        Self::new(master_seed, task_id, role as u32 | (attempt << 8))
    }

    pub fn rng(&self) -> KeyedRng {
        let mut seed = [0u8; 32];
        seed[..8].copy_from_slice(&self.master_seed.to_le_bytes());
        seed[8..12].copy_from_slice(&self.stream_id.to_le_bytes());
        // domain tag so that keys never collide with a plain ChaCha8 seed
        seed[24..].copy_from_slice(b"slrpower");
        let mut rng = ChaCha8Rng::from_seed(seed);
        rng.set_stream(self.task_id);
        rng
    }
}

/// What a stream is used for. Distinct roles never share random numbers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u32)]
pub enum StreamRole {
    CriticalValue = 1,
    PowerSearch = 2,
    PowerValidation = 3,
    PowerEstimate = 4,
    Correlation = 5,
    Diagnostics = 6,
}
