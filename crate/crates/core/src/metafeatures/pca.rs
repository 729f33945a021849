use nalgebra::{DMatrix, SymmetricEigen};

use super::{encode, TabularDataset};
use crate::Scalar;

/// Explained-variance ratios of the covariance of `rows`, largest first.
/// `None` when the total variance is zero (including zero columns).
pub fn explained_variance_ratios<T: Scalar>(rows: &[Vec<T>]) -> Option<Vec<f64>> {
    let n = rows.len();
    let dims = rows.first().map_or(0, Vec::len);
    if n < 2 || dims == 0 {
        return None;
    }
    let data = DMatrix::from_fn(n, dims, |i, j| rows[i][j].to_f64_lossy());
    let means = data.row_mean();
    let centred = DMatrix::from_fn(n, dims, |i, j| data[(i, j)] - means[j]);
    let cov = (centred.transpose() * &centred) / (n as f64 - 1.0);
    let mut eig: Vec<f64> = SymmetricEigen::new(cov).eigenvalues.iter().map(|v| v.max(0.0)).collect();
    eig.sort_by(|a, b| b.total_cmp(a));
    let total: f64 = eig.iter().sum();
    (total > 0.0).then(|| eig.into_iter().map(|v| v / total).collect())
}

/// Smallest number of leading components whose cumulative ratio reaches
/// `percent`%.
pub fn component_count(ratios: &[f64], percent: u32) -> usize {
    let goal = f64::from(percent) / 100.0 - 1e-12;
    let mut cum = 0.0;
    for (i, r) in ratios.iter().enumerate() {
        cum += r;
        if cum >= goal {
            return i + 1;
        }
    }
    ratios.len().max(1)
}

/// Components of the standardized encoded data needed for `percent`% of the
/// variance; 1 when there is no variance, `None` with fewer than 2 rows.
pub fn pca_component_count<T: Scalar>(ds: &TabularDataset<T>, percent: u32) -> Option<usize> {
    if ds.n_rows() < 2 {
        return None;
    }
    Some(explained_variance_ratios(&encode(ds).rows).map_or(1, |r| component_count(&r, percent)))
}
