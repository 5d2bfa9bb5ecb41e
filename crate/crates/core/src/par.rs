//! Data-parallel helpers. With the `parallel` feature (on by default) these
//! run on the rayon global pool; without it they fall back to plain
//! sequential iteration. Results never depend on which path ran.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Maps `f` over `items`, preserving input order.
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
        items.iter().map(f).collect()
    }
}

/// Smallest index in `0..count` satisfying `pred`, if any.
pub fn find_first(count: u64, pred: impl Fn(u64) -> bool + Sync + Send) -> Option<u64> {
    #[cfg(feature = "parallel")]
    {
        (0..count).into_par_iter().find_first(|&i| pred(i))
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..count).find(|&i| pred(i))
    }
}

/// True iff `pred` holds for every index in `0..count`.
pub fn all(count: u64, pred: impl Fn(u64) -> bool + Sync + Send) -> bool {
    #[cfg(feature = "parallel")]
    {
        (0..count).into_par_iter().all(pred)
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..count).all(pred)
    }
}

/// Whether the crate was built with the rayon backend.
pub const fn is_parallel() -> bool {
    cfg!(feature = "parallel")
}
