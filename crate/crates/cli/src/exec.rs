use rayon::prelude::*;

use loctime_core::Executor;

/// Executor backed by a dedicated rayon pool. Results come back in index
/// order, so output does not depend on the thread count.
pub struct Rayon {
    pool: rayon::ThreadPool,
}

impl Rayon {
    /// `threads = 0` lets rayon choose.
    pub fn new(threads: usize) -> Self {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .expect("thread pool");
        Rayon { pool }
    }
}

impl Executor for Rayon {
    fn map_indexed<T, F>(&self, len: usize, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(usize) -> T + Sync + Send,
    {
        self.pool.install(|| (0..len).into_par_iter().map(f).collect())
    }
}
