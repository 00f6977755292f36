//! Seeded, splittable random streams.
//!
//! Every parallel work item draws from its own ChaCha stream keyed by
//! `(seed, stream)`, so results do not depend on how work is scheduled.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

pub fn stream_rng(seed: u64, stream: u64) -> StreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Samples generated per stream when a budget is split into chunks.
pub const CHUNK: usize = 1024;

/// `(stream, count)` pairs covering `total` samples in fixed-size chunks.
pub fn chunks(total: usize) -> impl Iterator<Item = (u64, usize)> {
    (0..total.div_ceil(CHUNK)).map(move |c| (c as u64, CHUNK.min(total - c * CHUNK)))
}
