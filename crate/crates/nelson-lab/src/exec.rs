//! Rayon-backed executor for the core's parallel maps.

use nelson_core::exec::{Executor, MapItem};
use rayon::prelude::*;

/// Runs maps on a dedicated rayon pool. Results come back in index order,
/// so outputs do not depend on the thread count.
pub struct RayonExecutor {
    pool: rayon::ThreadPool,
}

impl RayonExecutor {
    /// `threads = 0` lets rayon pick the number of cores.
    pub fn new(threads: usize) -> Self {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().expect("failed to start thread pool");
        RayonExecutor { pool }
    }

    pub fn threads(&self) -> usize {
        self.pool.current_num_threads()
    }
}

impl Executor for RayonExecutor {
    fn map_boxed<'a>(&self, n: usize, f: &'a (dyn Fn(usize) -> MapItem + Sync + 'a)) -> Vec<MapItem> {
        self.pool.install(|| (0..n).into_par_iter().map(f).collect())
    }
}
