//! Counter-based random streams.
//!
//! Every trial draws from its own ChaCha8 stream selected by `(seed, index)`,
//! so a trial's randomness does not depend on which worker runs it or in
//! which order trials are scheduled.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StreamId {
    pub seed: u64,
    pub index: u64,
}

impl StreamId {
    pub fn new(seed: u64, index: u64) -> Self {
        Self { seed, index }
    }

    /// A fresh generator positioned at the start of this stream.
    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.index);
        rng
    }
}
