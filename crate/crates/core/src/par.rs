//! Trial-level parallelism with a sequential fallback.
//!
//! Every trial gets its own stream `rng.split(i)`, and results are returned
//! in trial order, so the two execution modes produce identical output.
//! Without the `parallel` feature, [`Execution::Parallel`] runs sequentially.

use crate::rng::Rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    /// `Sequential` when `SLPN_THREADS=1`, `Parallel` otherwise.
    pub fn from_env() -> Self {
        match threads_from_env() {
            Some(1) => Execution::Sequential,
            _ => Execution::Parallel,
        }
    }
}

/// Thread count requested through `SLPN_THREADS`, if set and valid.
pub fn threads_from_env() -> Option<usize> {
    std::env::var("SLPN_THREADS")
        .ok()
        .and_then(|s| s.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
}

/// Sizes the global worker pool. Later calls are ignored.
pub fn init_threads(threads: Option<usize>) {
    #[cfg(feature = "parallel")]
    {
        if let Some(n) = threads.or_else(threads_from_env) {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
    #[cfg(not(feature = "parallel"))]
    let _ = threads;
}

/// Runs `f(i, rng_i)` for `i in 0..trials`, returning results in order.
pub fn map_trials<T, F>(exec: Execution, rng: &Rng, trials: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize, &mut Rng) -> T + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            (0..trials)
                .into_par_iter()
                .map(|i| f(i, &mut rng.split(i as u64)))
                .collect()
        }
        _ => (0..trials).map(|i| f(i, &mut rng.split(i as u64))).collect(),
    }
}

/// Counts trials for which `f` returns true.
pub fn count_trials<F>(exec: Execution, rng: &Rng, trials: usize, f: F) -> usize
where
    F: Fn(usize, &mut Rng) -> bool + Sync + Send,
{
    map_trials(exec, rng, trials, f)
        .into_iter()
        .filter(|&b| b)
        .count()
}
