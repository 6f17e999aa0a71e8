//! Deterministically ordered evaluation of independent work items.
//!
//! Every bulk computation in this crate (m-function grids, certificate
//! sweeps) is a pure map over an index set; results must come back in input
//! order no matter how they were scheduled.  With the default `parallel`
//! feature the work is distributed by rayon; without it the same entry point
//! degrades to a plain sequential loop, and [`map_ordered_seq`] is always
//! available as an explicit sequential baseline for benchmarks.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Applies `f` to every item, returning results in input order.
pub fn map_ordered<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
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

/// Sequential twin of [`map_ordered`], independent of feature flags.
pub fn map_ordered_seq<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    F: Fn(&T) -> U,
{
    items.iter().map(f).collect()
}
