use crate::{Error, Result, Scalar};

pub const Z_95: f64 = 1.96;

/// Mean and 95% Gaussian half-width `1.96 * sd / sqrt(n)`, with the sample
/// (n - 1) standard deviation.
pub fn gaussian_ci<T: Scalar>(values: &[T]) -> Result<(T, T)> {
    let n = values.len();
    if n < 2 {
        return Err(Error::CiUndefined(n));
    }
    let n_t = T::from_count(n);
    let mean = values.iter().copied().sum::<T>() / n_t;
    let var = values.iter().map(|&v| (v - mean) * (v - mean)).sum::<T>() / T::from_count(n - 1);
    Ok((mean, T::lit(Z_95) * var.sqrt() / n_t.sqrt()))
}
