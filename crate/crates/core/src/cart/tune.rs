use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::{grow_tree, prune_path, PruningPath, RegressionTree};
use crate::{seed, Error, Result, Scalar};

pub const MIN_SAMPLES_LEAF_GRID: [usize; 3] = [3, 5, 7];
pub const CV_FOLDS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct TreeHyperParams<T> {
    pub min_samples_leaf: usize,
    pub alpha: T,
}

/// Tree chosen by cross-validation, with the winning hyper-parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct TunedTree<T> {
    pub tree: RegressionTree<T>,
    pub params: TreeHyperParams<T>,
    pub cv_mse: Option<T>,
    /// Too few rows to cross-validate; the tree is the mean leaf.
    pub fallback: bool,
}

/// Shuffled, contiguous fold blocks: fold `k` holds positions
/// `[k*n/folds, (k+1)*n/folds)` of a seeded permutation.
fn fold_assignment(n: usize, folds: usize, fold_seed: u64) -> Vec<Vec<usize>> {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut seed::rng(fold_seed));
    (0..folds)
        .map(|k| {
            let mut block = perm[k * n / folds..(k + 1) * n / folds].to_vec();
            block.sort_unstable();
            block
        })
        .collect()
}

fn subset<T: Clone>(v: &[T], idx: &[usize]) -> Vec<T> {
    idx.iter().map(|&i| v[i].clone()).collect()
}

fn mse<T: Scalar>(tree: &RegressionTree<T>, x: &[Vec<T>], y: &[T], idx: &[usize]) -> Result<T> {
    let mut total = T::zero();
    for &i in idx {
        let r = tree.predict(&x[i])? - y[i];
        total += r * r;
    }
    Ok(total / T::from_count(idx.len()))
}

struct FoldFit<T> {
    test: Vec<usize>,
    paths: Vec<PruningPath<T>>,
}

fn fit_folds<T: Scalar>(x: &[Vec<T>], y: &[T], seed: u64) -> Result<Vec<FoldFit<T>>> {
    let folds = fold_assignment(y.len(), CV_FOLDS, seed);
    folds
        .iter()
        .enumerate()
        .map(|(k, test)| {
            let train: Vec<usize> = folds.iter().enumerate().filter(|(j, _)| *j != k).flat_map(|(_, f)| f.clone()).collect();
            let (xt, yt) = (subset(x, &train), subset(y, &train));
            let paths = MIN_SAMPLES_LEAF_GRID
                .iter()
                .map(|&leaf| grow_tree(&xt, &yt, leaf).map(|t| prune_path(&t)))
                .collect::<Result<Vec<_>>>()?;
            Ok(FoldFit { test: test.clone(), paths })
        })
        .collect()
}

fn mean_fold_error<T: Scalar>(folds: &[FoldFit<T>], grid_pos: usize, alpha: T, x: &[Vec<T>], y: &[T]) -> Result<T> {
    let mut total = T::zero();
    for fold in folds {
        total += mse(fold.paths[grid_pos].subtree_for(alpha), x, y, &fold.test)?;
    }
    Ok(total / T::from_count(folds.len()))
}

/// Mean fold MSE of one hyper-parameter pair under the fold split used by
/// [`tune_and_fit`] with the same seed.
pub fn cv_error<T: Scalar>(x: &[Vec<T>], y: &[T], params: TreeHyperParams<T>, seed: u64) -> Result<T> {
    let pos = MIN_SAMPLES_LEAF_GRID
        .iter()
        .position(|&l| l == params.min_samples_leaf)
        .ok_or_else(|| Error::InvalidParameter(format!("min_samples_leaf {} not in grid", params.min_samples_leaf)))?;
    if y.len() < CV_FOLDS {
        return Err(Error::InvalidParameter(format!("need at least {CV_FOLDS} rows for CV")));
    }
    mean_fold_error(&fit_folds(x, y, seed)?, pos, params.alpha, x, y)
}

/// Tunes `min_samples_leaf` over {3, 5, 7} and the pruning strength over
/// each full-data pruning path by 5-fold CV, then refits on all rows.
///
/// The lowest mean fold MSE wins; ties go to the larger alpha and then the
/// larger `min_samples_leaf`. With fewer than 5 rows the result is the mean
/// leaf, flagged as a fallback.
pub fn tune_and_fit<T: Scalar>(x: &[Vec<T>], y: &[T], seed: u64) -> Result<TunedTree<T>> {
    if y.is_empty() {
        return Err(Error::EmptyTrainingSet);
    }
    if y.len() < CV_FOLDS {
        let leaf = grow_tree(x, y, usize::MAX)?;
        return Ok(TunedTree {
            tree: leaf,
            params: TreeHyperParams { min_samples_leaf: MIN_SAMPLES_LEAF_GRID[0], alpha: T::zero() },
            cv_mse: None,
            fallback: true,
        });
    }
    let full_paths = MIN_SAMPLES_LEAF_GRID
        .iter()
        .map(|&leaf| grow_tree(x, y, leaf).map(|t| prune_path(&t)))
        .collect::<Result<Vec<_>>>()?;
    let folds = fit_folds(x, y, seed)?;

    let mut best: Option<(T, usize, T)> = None;
    for (pos, path) in full_paths.iter().enumerate() {
        for &alpha in &path.alphas {
            let err = mean_fold_error(&folds, pos, alpha, x, y)?;
            let better = match best {
                None => true,
                Some((e, p, a)) => err < e || (err == e && (alpha > a || (alpha == a && pos > p))),
            };
            if better {
                best = Some((err, pos, alpha));
            }
        }
    }
    let (err, pos, alpha) = best.expect("every path has alpha 0");
    Ok(TunedTree {
        tree: full_paths[pos].subtree_for(alpha).clone(),
        params: TreeHyperParams { min_samples_leaf: MIN_SAMPLES_LEAF_GRID[pos], alpha },
        cv_mse: Some(err),
        fallback: false,
    })
}
