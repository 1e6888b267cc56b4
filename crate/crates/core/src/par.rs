//! Fan-out helper. Tasks run on scoped threads when `std` is enabled and
//! sequentially otherwise; output order always matches input order.

use alloc::vec::Vec;

pub(crate) fn map_tasks<T, R, F>(tasks: Vec<T>, f: F) -> Vec<R>
where
    T: Send,
    R: Send,
    F: Fn(T) -> R + Sync,
{
    #[cfg(feature = "std")]
    {
        if tasks.len() > 1 {
            let f = &f;
            return std::thread::scope(|scope| {
                let handles: Vec<_> = tasks.into_iter().map(|t| scope.spawn(move || f(t))).collect();
                handles
                    .into_iter()
                    .map(|h| h.join().expect("worker panicked"))
                    .collect()
            });
        }
    }
    tasks.into_iter().map(f).collect()
}

/// Split `len` items into `parts` contiguous near-equal ranges. The first
/// `len % parts` ranges are one longer.
pub(crate) fn split_ranges(len: usize, parts: usize) -> Vec<core::ops::Range<usize>> {
    let parts = parts.max(1);
    let base = len / parts;
    let extra = len % parts;
    let mut out = Vec::with_capacity(parts);
    let mut start = 0;
    for k in 0..parts {
        let size = base + usize::from(k < extra);
        out.push(start..start + size);
        start += size;
    }
    out
}
