//! Fan-out helpers for Monte Carlo work.
//!
//! [`map_indexed`] dispatches to rayon when the `parallel` feature is
//! enabled (the default) and to the sequential loop otherwise. Both paths
//! return results in index order, so callers aggregate identically and
//! seeded runs stay bit-reproducible regardless of scheduling.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Applies `f` to every index in `0..count`, in parallel when available.
pub fn map_indexed<T, F>(count: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        map_indexed_parallel(count, f)
    }
    #[cfg(not(feature = "parallel"))]
    {
        map_indexed_sequential(count, f)
    }
}

/// Sequential fallback; always available for comparison benchmarks.
pub fn map_indexed_sequential<T, F>(count: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..count).map(f).collect()
}

/// Rayon-backed fan-out over the index range.
#[cfg(feature = "parallel")]
pub fn map_indexed_parallel<T, F>(count: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..count).into_par_iter().map(f).collect()
}
