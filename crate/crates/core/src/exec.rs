//! Execution strategy for the Monte Carlo loops.
//!
//! Every loop in the crate is written as a map over task indices followed by
//! an order-independent reduction (integer sums) or an index-ordered collect.
//! Each task derives its random numbers from its own
//! [`StreamKey`](crate::stochastics::StreamKey), so the result is the same
//! whichever strategy runs it and however many workers the pool has.

use std::ops::Add;

/// How to run a batch of independent tasks.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub enum Execution {
    Sequential,
    /// Rayon work-stealing pool. Falls back to sequential when the crate is
    /// built without the `parallel` feature.
    #[default]
    Parallel,
}

impl Execution {
    /// True when this strategy will actually use the rayon pool.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }

    /// Maps `f` over `0..len` and returns the results in index order.
    pub fn map_collect<T, F>(self, len: u64, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(u64) -> T + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            use rayon::prelude::*;
            return (0..len).into_par_iter().map(f).collect();
        }
        (0..len).map(f).collect()
    }

    /// Maps `f` over `0..len` with per-worker scratch state and sums the
    /// results. Only use with associative, exact reductions (integer counts).
    pub fn sum_with<S, A, I, F>(self, len: u64, init: I, f: F) -> A
    where
        A: Add<Output = A> + Default + Send,
        I: Fn() -> S + Sync + Send,
        F: Fn(&mut S, u64) -> A + Sync + Send,
    {
        #[cfg(feature = "parallel")]
        if self.is_parallel() {
            use rayon::prelude::*;
            return (0..len)
                .into_par_iter()
                .map_init(&init, |s, i| f(s, i))
                .reduce(A::default, |a, b| a + b);
        }
        let mut state = init();
        (0..len).fold(A::default(), |acc, i| acc + f(&mut state, i))
    }
}

/// Sizes the global rayon pool. A no-op without the `parallel` feature.
/// Returns false if the pool was already initialised.
pub fn configure_threads(threads: usize) -> bool {
    #[cfg(feature = "parallel")]
    {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .is_ok()
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = threads;
        true
    }
}

/// Pair of counters that sums component-wise; used for (hits, resamples).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Tally {
    pub hits: u64,
    pub resampled: u64,
}

impl Add for Tally {
    type Output = Tally;
    fn add(self, rhs: Tally) -> Tally {
        Tally {
            hits: self.hits + rhs.hits,
            resampled: self.resampled + rhs.resampled,
        }
    }
}
