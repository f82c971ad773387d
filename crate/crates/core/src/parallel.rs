//! Worker-count control for the data-parallel operators.
//!
//! Every parallel operator in this crate runs on the ambient rayon pool.
//! Wrap a call in [`with_workers`] to pin it to a specific worker count.

use rayon::ThreadPoolBuilder;

/// Runs `op` on a dedicated pool of `workers` threads (at least one).
pub fn with_workers<R, F>(workers: usize, op: F) -> R
where
    R: Send,
    F: FnOnce() -> R + Send,
{
    ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .expect("failed to build worker pool")
        .install(op)
}

/// Logical cores available to this process.
pub fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

/// Splits `0..len` into at most `parts` contiguous, near-equal ranges.
pub(crate) fn split_ranges(len: usize, parts: usize) -> Vec<std::ops::Range<usize>> {
    let parts = parts.clamp(1, len.max(1));
    let base = len / parts;
    let extra = len % parts;
    let mut start = 0;
    (0..parts)
        .map(|i| {
            let end = start + base + usize::from(i < extra);
            let range = start..end;
            start = end;
            range
        })
        .collect()
}

/// Number of partitions to use for range-partitioned work on the current pool.
pub(crate) fn partitions() -> usize {
    rayon::current_num_threads() * 4
}
