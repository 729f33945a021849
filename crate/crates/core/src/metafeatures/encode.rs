use std::collections::BTreeMap;

use super::{ColumnValues, TabularDataset};
use crate::Scalar;

/// Numeric design matrix used for clustering and PCA.
#[derive(Debug, Clone, PartialEq)]
pub struct Encoded<T> {
    pub rows: Vec<Vec<T>>,
    pub n_dims: usize,
}

fn standardize<T: Scalar>(col: Vec<T>) -> Option<Vec<T>> {
    let (lo, hi) = col.iter().fold((T::infinity(), T::neg_infinity()), |(l, h), &v| (l.min(v), h.max(v)));
    if lo == hi {
        return None;
    }
    let n = T::from_count(col.len());
    let mean = col.iter().copied().sum::<T>() / n;
    let sd = (col.iter().map(|&v| (v - mean) * (v - mean)).sum::<T>() / n).sqrt();
    Some(col.into_iter().map(|v| (v - mean) / sd).collect())
}

/// Mean-imputes numerical columns, mode-imputes and one-hot encodes
/// categorical ones, then z-scores every column and drops constant ones.
/// Columns that are missing everywhere are dropped.
pub fn encode<T: Scalar>(ds: &TabularDataset<T>) -> Encoded<T> {
    let n = ds.n_rows();
    let mut out_cols: Vec<Vec<T>> = Vec::new();
    for col in ds.columns() {
        match &col.values {
            ColumnValues::Numerical(v) => {
                let present: Vec<T> = v.iter().flatten().copied().collect();
                if present.is_empty() {
                    continue;
                }
                let mean = present.iter().copied().sum::<T>() / T::from_count(present.len());
                out_cols.push(v.iter().map(|x| x.unwrap_or(mean)).collect());
            }
            ColumnValues::Categorical(v) => {
                let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
                for s in v.iter().flatten() {
                    *counts.entry(s.as_str()).or_default() += 1;
                }
                // Most frequent level, lexicographically first on ties.
                let Some(mode) = counts.iter().fold(None, |best: Option<(&str, usize)>, (&k, &c)| match best {
                    Some((_, bc)) if bc >= c => best,
                    _ => Some((k, c)),
                }) else {
                    continue;
                };
                for level in counts.keys() {
                    out_cols.push(
                        v.iter()
                            .map(|x| if x.as_deref().unwrap_or(mode.0) == *level { T::one() } else { T::zero() })
                            .collect(),
                    );
                }
            }
        }
    }
    let kept: Vec<Vec<T>> = out_cols.into_iter().filter_map(standardize).collect();
    let n_dims = kept.len();
    let rows = (0..n).map(|i| kept.iter().map(|c| c[i]).collect()).collect();
    Encoded { rows, n_dims }
}
