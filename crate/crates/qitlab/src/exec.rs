//! Deterministic parallel evaluation.
//!
//! Experiments evaluate one value per index (codebook, sample, hash
//! function), in parallel, into an index-ordered buffer; the reduction is
//! then a fixed-shape pairwise summation. Results are therefore
//! bit-identical for any thread count.

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Evaluate `f` over `0..n` with an optional dedicated thread pool.
pub(crate) fn map_indexed<F>(n: usize, threads: Option<usize>, f: F) -> Result<Vec<f64>>
where
    F: Fn(usize) -> Result<f64> + Sync,
{
    let run = || (0..n).into_par_iter().map(&f).collect::<Result<Vec<f64>>>();
    match threads {
        None | Some(0) => run(),
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
            pool.install(run)
        }
    }
}

/// Pairwise summation with a schedule that depends only on the length.
pub(crate) fn pairwise_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        2 => values[0] + values[1],
        n => {
            let mid = n / 2;
            pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
        }
    }
}

/// Sample mean and standard error (Bessel-corrected) of a value buffer.
pub(crate) fn mean_and_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (0.0, 0.0);
    }
    let mean = pairwise_sum(values) / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let sq: Vec<f64> = values.iter().map(|v| (v - mean) * (v - mean)).collect();
    let var = pairwise_sum(&sq) / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}
