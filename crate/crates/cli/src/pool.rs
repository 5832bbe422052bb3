//! Tiny scoped worker pool for grid scans. `ADSDEFORM_THREADS` caps the
//! parallelism; results are written into pre-indexed slots so the output is
//! identical for every thread count.

pub fn default_threads() -> usize {
    let avail = std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1);
    match std::env::var("ADSDEFORM_THREADS") {
        Ok(v) => v.parse::<usize>().ok().filter(|&n| n >= 1).unwrap_or(avail).min(avail.max(1)),
        Err(_) => avail,
    }
}

/// Map `f` over `0..n` with up to `threads` workers, preserving index order.
pub fn indexed_map<T: Send>(n: usize, threads: usize, f: impl Fn(usize) -> T + Sync) -> Vec<T> {
    let threads = threads.max(1).min(n.max(1));
    let mut out: Vec<Option<T>> = (0..n).map(|_| None).collect();
    let chunk = n.div_ceil(threads);
    std::thread::scope(|scope| {
        for (t, slice) in out.chunks_mut(chunk).enumerate() {
            let f = &f;
            scope.spawn(move || {
                for (i, slot) in slice.iter_mut().enumerate() {
                    *slot = Some(f(t * chunk + i));
                }
            });
        }
    });
    out.into_iter().map(|x| x.expect("worker filled slot")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn map_is_order_preserving() {
        let v = indexed_map(100, 4, |i| i * i);
        for (i, x) in v.iter().enumerate() {
            assert_eq!(*x, i * i);
        }
    }
}
