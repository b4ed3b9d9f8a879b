//! Execution policy for the data-parallel loops.
//!
//! Results never depend on the policy: work is indexed, each index owns its
//! random stream, and reductions combine fixed-size chunks in index order.

use serde::{Deserialize, Serialize};

/// Chunk length used by order-stable reductions.
pub const REDUCE_CHUNK: usize = 4096;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Execution {
    Sequential,
    /// Uses rayon when the `parallel` feature is enabled, otherwise runs
    /// sequentially. `threads: None` means the global pool.
    #[default]
    Parallel,
    ParallelWith { threads: usize },
}

impl Execution {
    /// Reads `KENDALL_WALKS_THREADS`, falling back to the global pool.
    pub fn from_env() -> Self {
        match std::env::var("KENDALL_WALKS_THREADS")
            .ok()
            .and_then(|v| v.trim().parse::<usize>().ok())
        {
            Some(0) | None => Execution::Parallel,
            Some(threads) => Execution::ParallelWith { threads },
        }
    }

    pub fn is_parallel(&self) -> bool {
        cfg!(feature = "parallel") && !matches!(self, Execution::Sequential)
    }

    /// Runs `op` inside a pool sized per the policy.
    pub fn install<R: Send>(&self, op: impl FnOnce() -> R + Send) -> R {
        #[cfg(feature = "parallel")]
        if let Execution::ParallelWith { threads } = *self {
            if let Ok(pool) = rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
                return pool.install(op);
            }
        }
        op()
    }
}

/// `(0..n).map(f)` under the given policy, results in index order.
pub fn map_indexed<T, F>(exec: Execution, n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        return exec.install(|| (0..n).into_par_iter().map(&f).collect());
    }
    let _ = exec;
    (0..n).map(f).collect()
}

/// Fills fixed-width rows of `buf`; `f(row_index, row)`.
pub fn for_each_row<T, F>(exec: Execution, buf: &mut [T], width: usize, f: F)
where
    T: Send,
    F: Fn(usize, &mut [T]) + Sync + Send,
{
    assert!(width > 0);
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        exec.install(|| {
            buf.par_chunks_mut(width)
                .enumerate()
                .for_each(|(i, row)| f(i, row))
        });
        return;
    }
    let _ = exec;
    buf.chunks_mut(width).enumerate().for_each(|(i, row)| f(i, row));
}

/// Sum of `f(x)` over `xs`, identical bits for every policy.
pub fn stable_sum<F>(exec: Execution, xs: &[f64], f: F) -> f64
where
    F: Fn(f64) -> f64 + Sync + Send,
{
    let partial = |chunk: &[f64]| chunk.iter().map(|&x| f(x)).sum::<f64>();
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        let parts: Vec<f64> =
            exec.install(|| xs.par_chunks(REDUCE_CHUNK).map(partial).collect());
        return parts.iter().sum();
    }
    let _ = exec;
    xs.chunks(REDUCE_CHUNK).map(partial).sum()
}

/// Sorts ascending by `f64::total_cmp`.
pub fn sort_f64(exec: Execution, xs: &mut [f64]) {
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        use rayon::prelude::*;
        exec.install(|| xs.par_sort_unstable_by(f64::total_cmp));
        return;
    }
    let _ = exec;
    xs.sort_unstable_by(f64::total_cmp);
}
