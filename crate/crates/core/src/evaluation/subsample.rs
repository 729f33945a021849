use rand::seq::index;

use crate::data::RunRecord;
use crate::scalar::floor_count;
use crate::{seed, Error, Result, Scalar};

/// Uniform sample of `floor(fraction * N)` records over the whole corpus,
/// without replacement, in original order.
pub fn subsample_results<T: Scalar>(records: &[RunRecord<T>], fraction: T, seed: u64) -> Result<Vec<RunRecord<T>>> {
    if !(fraction > T::zero() && fraction <= T::one()) {
        return Err(Error::InvalidParameter(format!("subsample fraction must lie in (0, 1], got {fraction}")));
    }
    let k = floor_count(fraction, records.len());
    if k == records.len() {
        return Ok(records.to_vec());
    }
    let mut picked = index::sample(&mut seed::rng(seed), records.len(), k).into_vec();
    picked.sort_unstable();
    Ok(picked.into_iter().map(|i| records[i].clone()).collect())
}
