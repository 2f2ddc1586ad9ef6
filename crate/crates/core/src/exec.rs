//! Trial execution: data-parallel over trial indices when the `parallel`
//! feature is on, plain iteration otherwise.
//!
//! Every trial owns a random stream derived from `(seed, trial index)`, so
//! results never depend on how trials are scheduled.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Random stream for one trial.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    /// Uses the rayon pool; identical to `Sequential` without the
    /// `parallel` feature.
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}

impl Execution {
    /// `f(i)` for every trial index, in index order.
    pub fn map<T, F>(self, trials: u64, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(u64) -> T + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Execution::Parallel => (0..trials).into_par_iter().map(f).collect(),
            _ => (0..trials).map(f).collect(),
        }
    }

    /// The first (lowest index) trial for which `f` returns `Some`.
    pub fn find_first<T, F>(self, trials: u64, f: F) -> Option<T>
    where
        T: Send,
        F: Fn(u64) -> Option<T> + Sync + Send,
    {
        match self {
            #[cfg(feature = "parallel")]
            Execution::Parallel => (0..trials).into_par_iter().find_map_first(f),
            _ => (0..trials).find_map(f),
        }
    }
}
