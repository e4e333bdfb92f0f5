//! Data-parallel helpers.
//!
//! With the `parallel` feature (on by default) these run on the rayon pool;
//! without it they fall back to plain iterators. The `seq_*` variants are
//! always sequential so both paths can be compared in one build.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Maps `f` over `items`, preserving order.
pub fn map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        seq_map(items, f)
    }
}

/// First index in `0..n` (lowest) whose `f` yields `Some`.
pub fn find_first<R, F>(n: usize, f: F) -> Option<(usize, R)>
where
    R: Send,
    F: Fn(usize) -> Option<R> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        (0..n).into_par_iter().find_map_first(|i| f(i).map(|r| (i, r)))
    }
    #[cfg(not(feature = "parallel"))]
    {
        seq_find_first(n, f)
    }
}

pub fn seq_map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    F: Fn(&T) -> R,
{
    items.iter().map(f).collect()
}

pub fn seq_find_first<R, F>(n: usize, f: F) -> Option<(usize, R)>
where
    F: Fn(usize) -> Option<R>,
{
    (0..n).find_map(|i| f(i).map(|r| (i, r)))
}

pub fn is_parallel() -> bool {
    cfg!(feature = "parallel")
}
