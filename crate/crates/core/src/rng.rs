//! Seeded random streams.
//!
//! Every replica owns independent streams derived from `(base_seed, replica,
//! purpose)`, so results do not depend on how replicas are scheduled across
//! threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// What a stream is used for. Tie-breaking draws live on their own stream so
/// that tie statistics can be audited independently of arrivals and service.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Purpose {
    Main = 1,
    Tie = 2,
    Oracle = 3,
    Sampler = 4,
    Reference = 5,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Independent stream for `(seed, replica, purpose)`.
pub fn stream(seed: u64, replica: u64, purpose: Purpose) -> StreamRng {
    let mut key = [0u8; 32];
    let mut state = seed ^ (purpose as u64).wrapping_mul(0xA076_1D64_78BD_642F);
    for chunk in key.chunks_mut(8) {
        state = splitmix64(state);
        chunk.copy_from_slice(&state.to_le_bytes());
    }
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(replica);
    rng
}

/// The pair of streams a single chain replica consumes.
#[derive(Debug, Clone)]
pub struct ChainRng {
    pub main: StreamRng,
    pub tie: StreamRng,
}

impl ChainRng {
    pub fn new(seed: u64, replica: u64) -> Self {
        Self { main: stream(seed, replica, Purpose::Main), tie: stream(seed, replica, Purpose::Tie) }
    }
}
