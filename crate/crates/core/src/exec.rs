//! Data-parallel execution helpers.
//!
//! With the `parallel` feature the helpers run on the current rayon pool;
//! a pool of one thread (or a build without the feature) takes a plain
//! sequential path. Every helper returns results in index order, so callers
//! that reduce sequentially over the returned vector get bit-identical
//! floating point results regardless of the thread count.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Number of worker threads available to the helpers.
pub fn current_threads() -> usize {
    #[cfg(feature = "parallel")]
    {
        rayon::current_num_threads()
    }
    #[cfg(not(feature = "parallel"))]
    {
        1
    }
}

/// Runs `f` with the helpers limited to `threads` workers. `None` keeps the
/// ambient pool (all cores by default).
pub fn with_threads<R, F>(threads: Option<usize>, f: F) -> R
where
    R: Send,
    F: FnOnce() -> R + Send,
{
    #[cfg(feature = "parallel")]
    {
        match threads {
            Some(n) => rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .expect("failed to build thread pool")
                .install(f),
            None => f(),
        }
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = threads;
        f()
    }
}

/// `(0..len).map(f).collect()`, possibly in parallel.
pub fn map_collect<T, F>(len: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        if current_threads() > 1 {
            return (0..len).into_par_iter().map(f).collect();
        }
    }
    (0..len).map(f).collect()
}

/// The first `Some` in index order of `(0..len).map(f)`.
pub fn find_first<T, F>(len: usize, f: F) -> Option<T>
where
    T: Send,
    F: Fn(usize) -> Option<T> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        if current_threads() > 1 {
            return (0..len).into_par_iter().find_map_first(f);
        }
    }
    (0..len).find_map(f)
}
