//! Seeded random streams.
//!
//! Every stochastic draw in the engine comes from a ChaCha8 generator keyed by
//! `(seed, stream)`. Streams are split by purpose and index, so adding a draw
//! to one purpose never shifts the values another purpose sees.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

/// Purpose tags occupying the high bits of a stream id.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Purpose {
    Init = 1,
    SimStep = 2,
    Policy = 3,
    Segmenter = 4,
    Lift = 5,
    Placement = 6,
    Dataset = 7,
    Split = 8,
}

pub fn stream(seed: u64, purpose: Purpose, index: u64) -> Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((purpose as u64) << 48) ^ index);
    rng
}
