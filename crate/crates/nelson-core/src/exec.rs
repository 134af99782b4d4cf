//! Execution strategy for embarrassingly parallel maps.
//!
//! The core only ships a sequential executor; a thread-pool implementation
//! lives in the companion crate. Results are always returned in index order,
//! so reductions over them do not depend on scheduling.

use alloc::vec::Vec;

/// Maps an index range to values, in any order internally but returning
/// results in index order.
pub trait Executor: Sync {
    fn map_boxed<'a>(&self, n: usize, f: &'a (dyn Fn(usize) -> MapItem + Sync + 'a)) -> Vec<MapItem>;
}

/// Type-erased item passed through [`Executor::map_boxed`].
pub type MapItem = alloc::boxed::Box<dyn core::any::Any + Send>;

impl dyn Executor + '_ {
    /// Typed wrapper over [`Executor::map_boxed`].
    pub fn map<T: Send + 'static>(&self, n: usize, f: &(dyn Fn(usize) -> T + Sync)) -> Vec<T> {
        let g = |i: usize| -> MapItem { alloc::boxed::Box::new(f(i)) };
        self.map_boxed(n, &g)
            .into_iter()
            .map(|b| *b.downcast::<T>().unwrap_or_else(|_| unreachable!("executor returned a foreign type")))
            .collect()
    }
}

/// Runs everything on the calling thread.
#[derive(Clone, Copy, Debug, Default)]
pub struct Sequential;

impl Executor for Sequential {
    fn map_boxed<'a>(&self, n: usize, f: &'a (dyn Fn(usize) -> MapItem + Sync + 'a)) -> Vec<MapItem> {
        (0..n).map(f).collect()
    }
}
