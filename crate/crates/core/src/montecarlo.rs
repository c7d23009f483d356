//! Deterministic parallel trial runner.
//!
//! Trial `b` draws from its own ChaCha8 stream `(seed, b)`, so results do not
//! depend on the number of workers or on scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Independent generator for one trial.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Runs `f(trial, rng)` for `trial in 0..trials` on `workers` threads
/// (`0` = rayon default) and returns results in trial order.
pub fn run_trials<R, F>(trials: u64, workers: usize, seed: u64, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(u64, &mut ChaCha8Rng) -> R + Sync,
{
    let work = || {
        (0..trials)
            .into_par_iter()
            .map(|b| f(b, &mut trial_rng(seed, b)))
            .collect()
    };
    if workers == 0 {
        return work();
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .expect("thread pool")
        .install(work)
}
