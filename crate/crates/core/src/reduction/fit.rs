use rayon::prelude::*;

use super::{FilterSequence, FilterStep};
use crate::cart::{tune_and_fit, RegressionTree};
use crate::data::{check_aligned, init_active, ActiveSets, Corpus, RatioMatrix, TimeAccounting, TimeMatrix};
use crate::metafeatures::MetaFeatureTable;
use crate::{seed, Error, Result, Scalar};

/// Leave-one-group-out targets for one group.
#[derive(Debug, Clone, PartialEq)]
pub struct LooTargets<T> {
    /// Dataset columns with a defined target, ascending.
    pub datasets: Vec<usize>,
    pub targets: Vec<T>,
    /// Active datasets on which no other group has a ratio.
    pub excluded: Vec<usize>,
}

/// For each active dataset of `group`, the best ratio over all other groups
/// (including ones already selected).
pub fn leave_one_out_targets<T: Scalar>(
    ratio: &RatioMatrix<T>,
    group: usize,
    active: &std::collections::BTreeSet<usize>,
) -> LooTargets<T> {
    let mut out = LooTargets { datasets: Vec::new(), targets: Vec::new(), excluded: Vec::new() };
    for &d in active {
        let best = (0..ratio.n_groups())
            .filter(|&i| i != group)
            .filter_map(|i| ratio.get(i, d))
            .fold(None, |acc: Option<T>, v| Some(acc.map_or(v, |a| a.max(v))));
        match best {
            Some(y) => {
                out.datasets.push(d);
                out.targets.push(y);
            }
            None => out.excluded.push(d),
        }
    }
    out
}

struct GroupFit<T> {
    tree: Option<RegressionTree<T>>,
    covered: Vec<usize>,
    savings: T,
}

fn fit_group<T: Scalar>(
    ratio: &RatioMatrix<T>,
    time: &TimeMatrix<T>,
    features: &[Vec<T>],
    threshold: T,
    active: &ActiveSets,
    group: usize,
    group_seed: u64,
) -> Result<GroupFit<T>> {
    let loo = leave_one_out_targets(ratio, group, active.get(group));
    if loo.datasets.is_empty() {
        return Ok(GroupFit { tree: None, covered: Vec::new(), savings: T::zero() });
    }
    let x: Vec<Vec<T>> = loo.datasets.iter().map(|&d| features[d].clone()).collect();
    let tree = tune_and_fit(&x, &loo.targets, group_seed)?.tree;
    let mut covered = Vec::new();
    let mut savings = T::zero();
    for (row, &d) in x.iter().zip(&loo.datasets) {
        if tree.predict(row)? >= threshold {
            covered.push(d);
            savings += time.get(group, d).unwrap_or_else(T::zero);
        }
    }
    Ok(GroupFit { tree: Some(tree), covered, savings })
}

/// Column means over the given rows, ignoring missing cells; a feature that
/// is missing everywhere gets 0.
pub(crate) fn feature_means<T: Scalar>(rows: &[&[Option<T>]], n_features: usize) -> Vec<T> {
    (0..n_features)
        .map(|f| {
            let (sum, n) = rows
                .iter()
                .filter_map(|r| r[f])
                .fold((T::zero(), 0usize), |(s, n), v| (s + v, n + 1));
            if n == 0 {
                T::zero()
            } else {
                sum / T::from_count(n)
            }
        })
        .collect()
}

/// Fits the filter sequence.
///
/// Per round, every group with usable active datasets gets a tuned tree on
/// its leave-one-out targets; its covered set is the usable datasets the
/// tree predicts at or above `threshold` and its savings are the summed
/// times there. The group with the largest savings (first in catalog order
/// on ties) becomes the next step and loses its covered datasets from its
/// active set. Fitting stops when the best savings are zero.
pub fn fit_shsr<T: Scalar>(
    ratio: &RatioMatrix<T>,
    time: &TimeMatrix<T>,
    meta: &MetaFeatureTable<T>,
    threshold: T,
    mut active: ActiveSets,
    seed: u64,
) -> Result<FilterSequence<T>> {
    check_aligned(ratio, time)?;
    if !threshold.is_finite() || threshold <= T::zero() {
        return Err(Error::InvalidParameter(format!("threshold must be finite and > 0, got {threshold}")));
    }
    if active.n_groups() != ratio.n_groups() {
        return Err(Error::InvalidParameter("active sets do not match the groups".into()));
    }
    let raw_rows: Vec<&[Option<T>]> = ratio
        .dataset_ids()
        .iter()
        .map(|d| meta.row(d).ok_or_else(|| Error::MissingMetaFeatures(d.clone())))
        .collect::<Result<_>>()?;
    let means = feature_means(&raw_rows, meta.n_features());
    let features: Vec<Vec<T>> =
        raw_rows.iter().map(|r| r.iter().zip(&means).map(|(v, m)| v.unwrap_or(*m)).collect()).collect();

    let mut seq = FilterSequence::empty(threshold, ratio.group_ids().to_vec(), meta.feature_names().to_vec(), means);
    for round in 0u64.. {
        let fits = (0..ratio.n_groups())
            .into_par_iter()
            .map(|g| fit_group(ratio, time, &features, threshold, &active, g, seed::derive(seed, &[round, g as u64])))
            .collect::<Result<Vec<_>>>()?;
        let mut best: Option<(usize, &GroupFit<T>)> = None;
        for (g, fit) in fits.iter().enumerate() {
            if best.is_none_or(|(_, b)| fit.savings > b.savings) {
                best = Some((g, fit));
            }
        }
        let Some((g, fit)) = best.filter(|(_, f)| f.savings > T::zero()) else {
            break;
        };
        log::debug!("round {round}: group {} saves {}", ratio.group_ids()[g], fit.savings);
        seq.steps.push(FilterStep {
            group_id: ratio.group_ids()[g].clone(),
            tree: fit.tree.clone().expect("positive savings imply a fitted tree"),
            covered_at_fit: fit.covered.iter().map(|&d| ratio.dataset_ids()[d].clone()).collect(),
            time_saved_at_fit: fit.savings,
        });
        active.remove_all(g, &fit.covered);
    }
    Ok(seq)
}

/// Builds matrices from `corpus`, starts every group on all its datasets and
/// fits the sequence.
pub fn fit_corpus<T: Scalar>(
    corpus: &Corpus<T>,
    meta: &MetaFeatureTable<T>,
    threshold: T,
    seed: u64,
    accounting: TimeAccounting,
) -> Result<FilterSequence<T>> {
    let (ratio, time) = corpus.matrices(accounting)?;
    let active = init_active(&ratio);
    fit_shsr(&ratio, &time, meta, threshold, active, seed)
}
