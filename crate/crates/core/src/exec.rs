// Copyright 2026 homog contributors
// SPDX-License-Identifier: Apache-2.0

//! Data-parallel map helpers.
//!
//! With the default `parallel` feature the maps fan out over rayon; without
//! it they run sequentially with identical semantics. Results always come
//! back in input order, and callers reduce sequentially, so outputs are
//! bit-identical regardless of thread count or feature choice.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Maps `f` over `items`, preserving input order.
pub fn map_ordered<T, R, F>(items: &[T], f: F) -> Vec<R>
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

/// Fallible [`map_ordered`]; returns the first error by input order.
pub fn try_map_ordered<T, R, E, F>(items: &[T], f: F) -> Result<Vec<R>, E>
where
    T: Sync,
    R: Send,
    E: Send,
    F: Fn(&T) -> Result<R, E> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        let results: Vec<Result<R, E>> = items.par_iter().map(f).collect();
        results.into_iter().collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

/// Caps worker threads for all subsequent parallel maps. `None` keeps the
/// available-parallelism default. Without the `parallel` feature this is a
/// no-op.
#[cfg(feature = "parallel")]
pub fn configure_threads(threads: Option<usize>) -> Result<(), String> {
    match threads {
        Some(n) if n >= 1 => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| e.to_string()),
        Some(0) => Err("thread count must be at least 1".into()),
        _ => Ok(()),
    }
}

#[cfg(not(feature = "parallel"))]
pub fn configure_threads(_threads: Option<usize>) -> Result<(), String> {
    Ok(())
}
