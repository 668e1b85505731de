//! Data-parallel helpers with a sequential fallback.
//!
//! Work is always split into the same fixed-size chunks and partial results
//! are combined left to right, so floating-point sums do not depend on the
//! thread count or on whether the `parallel` feature is enabled.

/// Items per chunk for deterministic reductions.
pub const CHUNK: usize = 2048;

/// Map `f` over `0..n` and return the per-item results in order.
pub fn map_indexed<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..n).into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..n).map(f).collect()
    }
}

/// Evaluate `chunk(start, end)` on fixed chunks of `0..n` and return the
/// chunk results in order.
pub fn map_chunks<T, F>(n: usize, chunk: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize, usize) -> T + Sync + Send,
{
    let chunks = n.div_ceil(CHUNK);
    map_indexed(chunks, |c| chunk(c * CHUNK, ((c + 1) * CHUNK).min(n)))
}

/// Whether this build runs on rayon.
pub fn is_parallel() -> bool {
    cfg!(feature = "parallel")
}
