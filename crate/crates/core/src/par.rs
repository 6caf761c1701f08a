//! Execution strategy for the data-parallel searches.
//!
//! Callers pick sequential or parallel execution per call; the sequential
//! path is always compiled, the parallel one delegates to a work-stealing
//! pool when the `parallel` feature is on and quietly degrades to the
//! sequential path when it is off. Both drivers here preserve index order,
//! so results are identical bit for bit regardless of the strategy or the
//! number of worker threads.

use std::ops::Range;

/// How a search should use the machine.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exec {
    Sequential,
    Parallel,
}

impl Default for Exec {
    /// Parallel when compiled in, sequential otherwise.
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Exec::Parallel
        } else {
            Exec::Sequential
        }
    }
}

impl Exec {
    pub(crate) fn runs_parallel(self) -> bool {
        self == Exec::Parallel && cfg!(feature = "parallel")
    }
}

fn chunk_ranges(range: Range<u64>, chunk: u64) -> Vec<Range<u64>> {
    assert!(chunk > 0);
    let mut out = Vec::new();
    let mut lo = range.start;
    while lo < range.end {
        let hi = range.end.min(lo + chunk);
        out.push(lo..hi);
        lo = hi;
    }
    out
}

/// Applies f to consecutive subranges and concatenates the results in index
/// order. The parallel result is identical to the sequential one.
pub(crate) fn map_ranges<T, F>(exec: Exec, range: Range<u64>, chunk: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(Range<u64>) -> Vec<T> + Sync,
{
    let ranges = chunk_ranges(range, chunk);
    #[cfg(feature = "parallel")]
    if exec.runs_parallel() {
        use rayon::prelude::*;
        let per_chunk: Vec<Vec<T>> = ranges.into_par_iter().map(&f).collect();
        return per_chunk.into_iter().flatten().collect();
    }
    let _ = exec;
    ranges.into_iter().flat_map(&f).collect()
}

/// First Some produced over consecutive subranges, by index order: the
/// parallel path may evaluate later chunks speculatively but still returns
/// exactly what the sequential scan would.
pub(crate) fn find_map_ranges<T, F>(
    exec: Exec,
    range: Range<u64>,
    chunk: u64,
    f: F,
) -> Option<T>
where
    T: Send,
    F: Fn(Range<u64>) -> Option<T> + Sync,
{
    let ranges = chunk_ranges(range, chunk);
    #[cfg(feature = "parallel")]
    if exec.runs_parallel() {
        use rayon::prelude::*;
        return ranges.into_par_iter().filter_map(&f).find_first(|_| true);
    }
    let _ = exec;
    ranges.into_iter().find_map(&f)
}
