//! Data-parallel execution helpers.
//!
//! Sweep cells, quadrature samples, and grid scans are all independent, so
//! they run through [`map_indexed`]: rayon-parallel when the `parallel`
//! feature is enabled, a plain loop otherwise. Results come back in index
//! order and every reduction downstream folds them sequentially, so outputs
//! do not depend on thread count. [`map_indexed_seq`] is always sequential;
//! the benchmark suite uses it as the baseline.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Single work items are cheap (a handful of transcendental calls), so
/// tasks are handed out in blocks to keep scheduling overhead amortized.
#[cfg(feature = "parallel")]
const MIN_BLOCK: usize = 1024;

/// Apply `f` to `0..n` and collect results in index order.
pub fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().with_min_len(MIN_BLOCK).map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

/// Sequential reference version of [`map_indexed`].
pub fn map_indexed_seq<T, F>(n: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..n).map(f).collect()
}
