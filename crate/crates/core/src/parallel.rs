//! Replica-parallel execution with index-ordered results.
//!
//! Every replica derives its randomness from its own index, and results are
//! collected in index order before any reduction, so totals do not depend on
//! the number of worker threads.

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Evaluate `f(i)` for `i in 0..n` on the current pool, results in index order.
pub fn map_replicas<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    (0..n).into_par_iter().map(f).collect()
}

/// Like [`map_replicas`] with per-worker scratch state created by `init`.
pub fn map_replicas_with<S, T, I, F>(n: usize, init: I, f: F) -> Vec<T>
where
    T: Send,
    I: Fn() -> S + Sync + Send,
    F: Fn(&mut S, usize) -> T + Sync + Send,
{
    (0..n).into_par_iter().map_init(init, f).collect()
}

/// Run `f` inside a dedicated pool of `threads` workers (`None`: rayon default).
pub fn with_threads<T, F>(threads: Option<usize>, f: F) -> Result<T>
where
    T: Send,
    F: FnOnce() -> T + Send,
{
    match threads {
        None => Ok(f()),
        Some(0) => Err(Error::Domain("thread count must be at least 1".into())),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::Numerical(format!("cannot build thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

/// Sample mean and standard error of the mean, summed in index order.
pub fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Elementwise sum of `f(i)` over `i in 0..n`.
///
/// Replicas are summed sequentially inside fixed-size chunks and the chunk
/// totals are then summed in chunk order, so the result is bit-identical for
/// any thread count while memory stays bounded.
pub fn ordered_sum<S, I, F>(n: usize, len: usize, init: I, f: F) -> Vec<f64>
where
    I: Fn() -> S + Sync + Send,
    F: Fn(&mut S, usize, &mut [f64]) + Sync + Send,
{
    const CHUNK: usize = 32;
    let chunks = n.div_ceil(CHUNK);
    let partial: Vec<Vec<f64>> = (0..chunks)
        .into_par_iter()
        .map_init(
            || (init(), vec![0.0; len]),
            |(state, scratch), c| {
                let mut acc = vec![0.0; len];
                for i in c * CHUNK..((c + 1) * CHUNK).min(n) {
                    scratch.iter_mut().for_each(|v| *v = 0.0);
                    f(state, i, scratch);
                    for (a, v) in acc.iter_mut().zip(scratch.iter()) {
                        *a += v;
                    }
                }
                acc
            },
        )
        .collect();
    let mut total = vec![0.0; len];
    for p in partial {
        for (t, v) in total.iter_mut().zip(p) {
            *t += v;
        }
    }
    total
}
