//! Replica-level execution: rayon when the `parallel` feature is on, a
//! plain sequential loop otherwise.
//!
//! Replicas are processed in fixed batches of [`BATCH`] and batch results
//! are merged in batch order, so floating-point reductions are identical
//! for every thread budget.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const BATCH: u64 = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Execution {
    Sequential,
    Parallel { threads: usize },
}

impl Execution {
    /// `threads == 1` (or a build without the `parallel` feature) runs
    /// sequentially; `threads == 0` means one worker per core.
    pub fn from_threads(threads: usize) -> Self {
        if threads == 1 || !cfg!(feature = "parallel") {
            Self::Sequential
        } else {
            Self::Parallel { threads }
        }
    }
}

impl Default for Execution {
    fn default() -> Self {
        Self::from_threads(0)
    }
}

/// Runs `step(worker, acc, replica)` for every replica in `0..replicas`.
///
/// `make_worker` builds reusable scratch state (never randomness), `init`
/// a fresh per-batch accumulator, and `merge` folds batch accumulators
/// left to right.
pub fn fold_replicas<W, A, MW, I, S, M>(
    exec: Execution,
    replicas: u64,
    make_worker: MW,
    init: I,
    step: S,
    merge: M,
) -> A
where
    A: Send,
    MW: Fn() -> W + Sync + Send,
    I: Fn() -> A + Sync + Send,
    S: Fn(&mut W, &mut A, u64) + Sync + Send,
    M: Fn(&mut A, A),
{
    let batches = replicas.div_ceil(BATCH);
    let run_batch = |worker: &mut W, b: u64| {
        let mut acc = init();
        for r in (b * BATCH)..((b + 1) * BATCH).min(replicas) {
            step(worker, &mut acc, r);
        }
        acc
    };
    let parts: Vec<A> = match exec {
        Execution::Sequential => {
            let mut worker = make_worker();
            (0..batches).map(|b| run_batch(&mut worker, b)).collect()
        }
        Execution::Parallel { threads } => parallel_batches(threads, batches, &make_worker, &run_batch),
    };
    let mut total = init();
    for part in parts {
        merge(&mut total, part);
    }
    total
}

/// [`fold_replicas`] for fallible replicas: the first error in replica
/// order wins and later replicas of that batch are skipped.
pub fn try_fold_replicas<W, A, MW, I, S, M>(
    exec: Execution,
    replicas: u64,
    make_worker: MW,
    init: I,
    step: S,
    merge: M,
) -> Result<A>
where
    A: Send,
    MW: Fn() -> W + Sync + Send,
    I: Fn() -> A + Sync + Send,
    S: Fn(&mut W, &mut A, u64) -> Result<()> + Sync + Send,
    M: Fn(&mut A, A),
{
    let (acc, err) = fold_replicas(
        exec,
        replicas,
        make_worker,
        || (init(), None::<Error>),
        |w, acc: &mut (A, Option<Error>), r| {
            if acc.1.is_none() {
                if let Err(e) = step(w, &mut acc.0, r) {
                    acc.1 = Some(e);
                }
            }
        },
        |total, (part, err)| {
            if total.1.is_none() {
                total.1 = err;
            }
            merge(&mut total.0, part);
        },
    );
    match err {
        Some(e) => Err(e),
        None => Ok(acc),
    }
}

#[cfg(feature = "parallel")]
fn parallel_batches<W, A, MW, R>(threads: usize, batches: u64, make_worker: &MW, run_batch: &R) -> Vec<A>
where
    A: Send,
    MW: Fn() -> W + Sync + Send,
    R: Fn(&mut W, u64) -> A + Sync + Send,
{
    use rayon::prelude::*;
    let work = || (0..batches).into_par_iter().map_init(make_worker, run_batch).collect();
    match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(pool) => pool.install(work),
        Err(_) => work(),
    }
}

#[cfg(not(feature = "parallel"))]
fn parallel_batches<W, A, MW, R>(_threads: usize, batches: u64, make_worker: &MW, run_batch: &R) -> Vec<A>
where
    MW: Fn() -> W,
    R: Fn(&mut W, u64) -> A,
{
    let mut worker = make_worker();
    (0..batches).map(|b| run_batch(&mut worker, b)).collect()
}

/// Maps every item independently, preserving order.
pub fn map_ordered<T, U, F>(exec: Execution, items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    match exec {
        Execution::Sequential => items.iter().map(f).collect(),
        #[cfg(feature = "parallel")]
        Execution::Parallel { threads } => {
            use rayon::prelude::*;
            let work = || items.par_iter().map(&f).collect();
            match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
                Ok(pool) => pool.install(work),
                Err(_) => work(),
            }
        }
        #[cfg(not(feature = "parallel"))]
        Execution::Parallel { .. } => items.iter().map(f).collect(),
    }
}
