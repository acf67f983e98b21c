//! Counter-based random streams and deterministic parallel maps.
//!
//! Every sample draws from its own ChaCha8 stream keyed by
//! `(seed, tag, index)`, so results do not depend on scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub type StreamRng = ChaCha8Rng;

/// Stream tags separating independent uses of one seed.
pub mod tags {
    pub const HAAR: u64 = 1;
    pub const TAIL: u64 = 2;
    pub const SIEGEL: u64 = 3;
    pub const SCENE: u64 = 4;
    pub const FLIGHT: u64 = 5;
    pub const TRANSITION: u64 = 6;
    pub const MERGED: u64 = 7;
    pub const TRAJECTORY: u64 = 8;
}

pub fn stream(seed: u64, tag: u64, index: u64) -> StreamRng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&tag.to_le_bytes());
    key[16..24].copy_from_slice(&index.to_le_bytes());
    ChaCha8Rng::from_seed(key)
}

/// Independent seed for the k-th sub-experiment of a run.
pub fn derive(seed: u64, k: u64) -> u64 {
    seed ^ k.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Maps `f` over `0..n` on `workers` threads, returning results in index order.
pub fn par_map<T, F>(n: usize, workers: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    let run = || (0..n as u64).into_par_iter().map(&f).collect();
    match rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
    {
        Ok(pool) => pool.install(run),
        Err(_) => (0..n as u64).map(&f).collect(),
    }
}

/// `par_map` with a fresh stream per index.
pub fn par_sample<T, F>(n: usize, workers: usize, seed: u64, tag: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut StreamRng) -> T + Sync + Send,
{
    par_map(n, workers, |i| f(&mut stream(seed, tag, i)))
}
