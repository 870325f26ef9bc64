//! Seeded, splittable random streams for simulation.
//!
//! Every Monte Carlo run draws from `substream(seed, run_index)`: a ChaCha8
//! generator keyed by the seed and positioned on its own stream, so runs are
//! reproducible and independent of scheduling order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

pub fn substream(seed: u64, index: u64) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}
