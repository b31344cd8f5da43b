use std::ops::Range;
use std::time::Instant;

use rayon::prelude::*;

use crate::error::{usage, Result};

/// Work items per parallel chunk. Fixed so that chunk boundaries, and therefore floating-point
/// reduction order, do not depend on the thread count.
pub const CHUNK: usize = 4096;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RunOptions {
    /// Worker threads; `None` uses every core.
    pub threads: Option<usize>,
}

/// Runs `work` on a dedicated pool and reports its wall-clock time.
pub(crate) fn run_on_pool<T: Send>(
    options: &RunOptions,
    work: impl FnOnce() -> T + Send,
) -> Result<(T, f64)> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(k) = options.threads {
        if k == 0 {
            return Err(usage("--threads must be positive"));
        }
        builder = builder.num_threads(k);
    }
    let pool = builder
        .build()
        .map_err(|e| usage(format!("cannot start {:?} threads: {e}", options.threads)))?;
    let start = Instant::now();
    let out = pool.install(work);
    Ok((out, start.elapsed().as_secs_f64()))
}

/// Maps `f` over fixed-size chunks of `0..count` in parallel, returning results in order.
pub(crate) fn map_chunks<A: Send>(count: usize, f: impl Fn(usize, Range<usize>) -> A + Sync) -> Vec<A> {
    let chunks = count.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|c| f(c, c * CHUNK..((c + 1) * CHUNK).min(count)))
        .collect()
}

/// Stream index for the random source of one work item, unique across purposes and labels.
pub(crate) fn stream(purpose: u64, label: u64, index: u64) -> u64 {
    debug_assert!(index < 1 << 48);
    (purpose << 56) | (label << 48) | index
}
