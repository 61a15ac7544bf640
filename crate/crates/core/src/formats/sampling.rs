//! Deterministic uniform subsampling of ordered frame lists.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum SampleError {
    #[error("sample count must be at least 1")]
    ZeroSampleCount,
}

/// Indices of a uniform `k`-subsample of `n` ordered items:
/// `floor(i * n / k)` for `i = 0..k`. Requesting at least `n` items keeps
/// all of them.
///
/// The result always starts at index 0, is strictly increasing, and its
/// gaps never differ by more than one — no RNG involved, so sampling is
/// reproducible by construction.
pub fn uniform_sample_indices(n: usize, k: usize) -> Result<Vec<usize>, SampleError> {
    if k == 0 {
        return Err(SampleError::ZeroSampleCount);
    }
    if k >= n {
        return Ok((0..n).collect());
    }
    Ok((0..k)
        .map(|i| ((i as u128 * n as u128) / k as u128) as usize)
        .collect())
}

/// Clones a uniform `k`-subsample of `items`, preserving order.
pub fn uniform_sample<T: Clone>(items: &[T], k: usize) -> Result<Vec<T>, SampleError> {
    Ok(uniform_sample_indices(items.len(), k)?
        .into_iter()
        .map(|i| items[i].clone())
        .collect())
}
