//! Parallel shot driver.

use std::ops::Range;

use rayon::prelude::*;

use crate::engine::seed::SeedPolicy;
use crate::engine::shot::{run_shot, PreparedCircuit, ShotOptions, ShotRecord};
use crate::error::{Error, Result};
use crate::noise::NoiseParams;
use crate::scalar::Real;

/// Environment variable that sets the worker count.
pub const WORKERS_ENV: &str = "BACONSHOR_WORKERS";

/// Worker count from the environment, else the available parallelism.
pub fn default_workers() -> usize {
    std::env::var(WORKERS_ENV)
        .ok()
        .and_then(|v| v.parse().ok())
        .filter(|&n| n > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

/// Runs shots `shots` (by index) on `workers` threads. Records come back in
/// shot order and depend only on the seed policy and the shot indices.
pub fn run_monte_carlo<T: Real>(
    prepared: &PreparedCircuit,
    params: &NoiseParams,
    shots: Range<u64>,
    seed: &SeedPolicy,
    options: &ShotOptions,
    workers: usize,
) -> Result<Vec<ShotRecord>> {
    if shots.is_empty() {
        return Err(Error::InvalidArgument("need at least one shot".into()));
    }
    params.validate()?;
    let one = |index: u64| {
        let mut rng = seed.rng_for(index);
        run_shot::<T, _>(prepared, params, options, None, &mut rng).map(|mut r| {
            r.shot = index;
            r
        })
    };
    if workers <= 1 {
        return shots.map(one).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
    pool.install(|| shots.into_par_iter().map(one).collect())
}
