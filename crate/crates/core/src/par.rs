//! Data-parallel helpers. With the `parallel` feature these run on rayon;
//! without it, or inside [`sequential`], they fall back to plain sequential
//! iteration with identical results.

use std::cell::Cell;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

thread_local! {
    static FORCE_SEQUENTIAL: Cell<bool> = const { Cell::new(false) };
}

fn forced() -> bool {
    FORCE_SEQUENTIAL.with(|c| c.get())
}

/// Runs `f` with every helper of this module on the sequential path.
/// Nested calls stay on the calling thread, so the flag covers them too.
pub fn sequential<R>(f: impl FnOnce() -> R) -> R {
    let before = FORCE_SEQUENTIAL.with(|c| c.replace(true));
    let out = f();
    FORCE_SEQUENTIAL.with(|c| c.set(before));
    out
}

/// Maps `f` over `items`, preserving order.
pub fn map<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if !forced() {
        return items.par_iter().map(f).collect();
    }
    items.iter().map(f).collect()
}

/// Maps `f` over `0..n`, preserving order.
pub fn map_range<R, F>(n: usize, f: F) -> Vec<R>
where
    R: Send,
    F: Fn(usize) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if !forced() {
        return (0..n).into_par_iter().map(f).collect();
    }
    (0..n).map(f).collect()
}

/// Number of workers the helpers use from here.
pub fn threads() -> usize {
    #[cfg(feature = "parallel")]
    if !forced() {
        return rayon::current_num_threads();
    }
    1
}

/// Runs `f` on a dedicated pool of `n` workers (sequentially without `parallel`).
pub fn with_threads<R, F>(n: usize, f: F) -> R
where
    R: Send,
    F: FnOnce() -> R + Send,
{
    #[cfg(feature = "parallel")]
    {
        match rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build() {
            Ok(pool) => pool.install(f),
            Err(_) => f(),
        }
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = n;
        f()
    }
}
