//! Seed splitting.
//!
//! Every random quantity is drawn from ChaCha8 seeded with the single run
//! seed (`seed_from_u64`) and a per-purpose stream id (`set_stream`), so the
//! draws of one module never depend on how many numbers another consumed.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum StreamId {
    Haar = 1,
    Coefficients = 2,
    Cloud = 3,
    Symbols = 4,
    Points = 5,
    Oracle = 6,
    /// Fresh points of the larger truncation in a covering bracket.
    BracketCloud = 7,
}

pub fn stream(seed: u64, id: StreamId) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id as u64);
    rng
}
