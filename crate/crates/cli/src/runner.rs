//! Worker pool bridging the core's replicate abstraction onto rayon.

use ratchet_core::stream::ReplicateRunner;
use rayon::prelude::*;

/// Order-preserving parallel executor. Results are collected by replicate
/// index, and each replicate seeds its own stream, so the output is
/// byte-identical whatever the thread count.
pub struct RayonRunner {
    pool: rayon::ThreadPool,
}

impl RayonRunner {
    pub fn new(threads: usize) -> Self {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads.max(1))
            .build()
            .expect("thread pool construction");
        Self { pool }
    }

    pub fn threads(&self) -> usize {
        self.pool.current_num_threads()
    }
}

impl ReplicateRunner for RayonRunner {
    fn run<T, F>(&self, replicates: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync,
    {
        // `f` is Sync but not necessarily Send, so hand rayon a borrow.
        let f = &f;
        self.pool.install(|| (0..replicates).into_par_iter().map(|i| f(i)).collect())
    }
}
