//! Chunked loops that run on the rayon pool when the `parallel` feature is
//! on and the workload is large enough, and sequentially otherwise.
//!
//! Each chunk is processed by the same sequential code in both modes, so the
//! output does not depend on the thread count.

/// Below this many elements the loops stay on the calling thread.
pub(crate) const MIN_PARALLEL_LEN: usize = 1 << 14;

/// Elements handed to one rayon task at minimum.
#[cfg(feature = "parallel")]
const GRAIN: usize = 1 << 12;

pub(crate) fn for_each_chunk_mut<T, F>(data: &mut [T], chunk: usize, f: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Send + Sync,
{
    assert!(chunk > 0);
    #[cfg(feature = "parallel")]
    if data.len() >= MIN_PARALLEL_LEN && data.len() > chunk {
        use rayon::prelude::*;
        let min_len = (GRAIN / chunk).max(1);
        data.par_chunks_mut(chunk)
            .with_min_len(min_len)
            .enumerate()
            .for_each(|(i, c)| f(i, c));
        return;
    }
    data.chunks_mut(chunk)
        .enumerate()
        .for_each(|(i, c)| f(i, c));
}

/// Like [`for_each_chunk_mut`] over two equally long slices in lockstep.
pub(crate) fn for_each_chunk_mut2<T, F>(a: &mut [T], b: &mut [T], chunk: usize, f: F)
where
    T: Send,
    F: Fn(usize, &mut [T], &mut [T]) + Send + Sync,
{
    assert_eq!(a.len(), b.len());
    assert!(chunk > 0);
    #[cfg(feature = "parallel")]
    if a.len() >= MIN_PARALLEL_LEN {
        use rayon::prelude::*;
        a.par_chunks_mut(chunk)
            .zip(b.par_chunks_mut(chunk))
            .enumerate()
            .for_each(|(i, (x, y))| f(i, x, y));
        return;
    }
    a.chunks_mut(chunk)
        .zip(b.chunks_mut(chunk))
        .enumerate()
        .for_each(|(i, (x, y))| f(i, x, y));
}

/// Maps `f` over `items`, in parallel when the feature is enabled. Output
/// order always matches input order.
pub(crate) fn map_collect<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Send + Sync,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}
