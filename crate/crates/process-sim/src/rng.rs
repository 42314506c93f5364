//! Reproducible random streams.
//!
//! Each run is keyed by a `u64` seed. ChaCha8 is counter-based, so one seed
//! yields many independent streams: replica `r` drives its path noise from
//! stream `2r` and its exponential observation clocks from stream `2r + 1`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

pub fn path_rng(seed: u64, replica: u64) -> SimRng {
    stream(seed, 2 * replica)
}

pub fn clock_rng(seed: u64, replica: u64) -> SimRng {
    stream(seed, 2 * replica + 1)
}

fn stream(seed: u64, id: u64) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}
