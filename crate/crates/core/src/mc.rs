//! Deterministic sharded sampling.
//!
//! Work is split into [`SHARDS`] shards regardless of the thread count. Shard
//! `s` draws from the ChaCha8 stream `s` of the generator seeded with the
//! user seed, and shard results are merged in shard order, so estimates are
//! bit-identical for a fixed seed on any number of threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub const SHARDS: usize = 64;

/// Generator for stream `stream` of `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Number of samples assigned to `shard` out of `total`.
pub fn shard_len(total: u64, shard: usize) -> u64 {
    total / SHARDS as u64 + u64::from((shard as u64) < total % SHARDS as u64)
}

/// Run `work(rng, count)` on every shard in parallel and return the results
/// in shard order.
pub fn run_sharded<T, F>(total: u64, seed: u64, work: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng, u64) -> T + Sync,
{
    (0..SHARDS)
        .into_par_iter()
        .map(|s| work(&mut stream_rng(seed, s as u64), shard_len(total, s)))
        .collect()
}
