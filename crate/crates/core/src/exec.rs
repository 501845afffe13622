//! Execution helpers for the data-parallel inner loops.
//!
//! Every call site maps an index range to a `Vec` and reduces in index
//! order afterwards, so results are identical whether the map runs on
//! rayon (feature `parallel`, default) or sequentially.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Maps `0..count` through `f`, in parallel when the `parallel` feature is on.
#[cfg(feature = "parallel")]
pub(crate) fn map_indexed<T, F>(count: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..count).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map_indexed<T, F>(count: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    map_indexed_seq(count, f)
}

/// Sequential reference path; also what the non-parallel build runs.
pub(crate) fn map_indexed_seq<T, F>(count: usize, f: F) -> Vec<T>
where
    F: Fn(usize) -> T,
{
    (0..count).map(f).collect()
}
