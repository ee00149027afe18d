//! Reproducible random streams.
//!
//! Every random decision draws from a ChaCha stream keyed by a master seed, an
//! index (trial, grid point, ...) and a purpose tag. ChaCha is counter based, so
//! two streams with different keys never overlap and a trial's randomness does
//! not depend on which worker runs it or in which order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

/// What a stream is used for. Distinct tags give independent streams.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
#[repr(u16)]
pub enum Purpose {
    Graph = 1,
    Coloring = 2,
    Clusters = 3,
    Reservoir = 4,
    Split = 5,
    Screening = 6,
    Embedding = 7,
    Sampling = 8,
    Trial = 9,
}

/// Opens the stream for `(master, index, purpose)`.
pub fn stream(master: u64, index: u64, purpose: Purpose) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream((index << 16) | purpose as u64);
    rng
}

/// Derives a child seed for nested components that take a plain `u64` seed.
pub fn derive_seed(master: u64, index: u64, purpose: Purpose) -> u64 {
    use rand::RngCore;
    stream(master, index, purpose).next_u64()
}
