use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rayon::prelude::*;

use super::report::{Aggregate, DatasetOutcome, EvaluationReport, RepeatOutcome};
use super::{gaussian_ci, Policy};
use crate::data::{pooled_time, Corpus, RunRecord, TimeAccounting};
use crate::metafeatures::MetaFeatureTable;
use crate::scalar::floor_count;
use crate::{seed, Error, Result, Scalar};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HoldoutConfig {
    pub repeats: usize,
    pub test_fraction: f64,
    pub seed: u64,
    pub accounting: TimeAccounting,
}

impl Default for HoldoutConfig {
    fn default() -> Self {
        HoldoutConfig {
            repeats: super::DEFAULT_REPEATS,
            test_fraction: super::DEFAULT_TEST_FRACTION,
            seed: 0,
            accounting: TimeAccounting::Deduplicate,
        }
    }
}

/// Seeded split of `datasets` into (train, test); the test side holds
/// `max(1, floor(test_fraction * D))` datasets.
pub fn split_datasets<'a>(datasets: &[&'a str], test_fraction: f64, seed: u64) -> (BTreeSet<&'a str>, BTreeSet<&'a str>) {
    let n_test = floor_count(test_fraction, datasets.len()).max(1).min(datasets.len());
    let mut order = datasets.to_vec();
    order.shuffle(&mut seed::rng(seed));
    let test = order[..n_test].iter().copied().collect();
    let train = order[n_test..].iter().copied().collect();
    (train, test)
}

/// Ratios for one dataset given the configurations a policy kept.
pub fn outcome_for<T: Scalar>(
    dataset_id: &str,
    records: &[RunRecord<T>],
    kept: &BTreeSet<String>,
    accounting: TimeAccounting,
) -> DatasetOutcome<T> {
    let kept_recs: Vec<&RunRecord<T>> = records.iter().filter(|r| kept.contains(&r.config_id)).collect();
    let best = |rs: &mut dyn Iterator<Item = &RunRecord<T>>| rs.map(|r| r.performance).fold(T::neg_infinity(), T::max);
    let best_all = best(&mut records.iter());
    let perf_ratio = (!kept_recs.is_empty()).then(|| best(&mut kept_recs.iter().copied()) / best_all);
    let total = pooled_time(records, accounting);
    let time_ratio = if total > T::zero() { pooled_time(kept_recs.iter().copied(), accounting) / total } else { T::one() };
    DatasetOutcome {
        dataset_id: dataset_id.to_string(),
        perf_ratio,
        time_ratio,
        kept_configs: kept_recs.len(),
        flagged: kept_recs.is_empty(),
    }
}

fn mean<T: Scalar>(values: &[T]) -> Option<T> {
    (!values.is_empty()).then(|| values.iter().copied().sum::<T>() / T::from_count(values.len()))
}

fn run_repeat<T: Scalar, P: Policy<T> + ?Sized>(
    corpus: &Corpus<T>,
    meta: &MetaFeatureTable<T>,
    policy: &P,
    config: &HoldoutConfig,
    repeat: usize,
) -> Result<RepeatOutcome<T>> {
    let repeat_seed = seed::derive(config.seed, &[repeat as u64]);
    let datasets: Vec<&str> = corpus.dataset_ids().collect();
    let (train_ids, test_ids) = split_datasets(&datasets, config.test_fraction, repeat_seed);
    let train = corpus.restrict(&train_ids);
    let recommender = policy.fit(&train, meta, corpus.catalog(), seed::derive(repeat_seed, &[1]))?;
    let mut outcomes = Vec::with_capacity(test_ids.len());
    for d in test_ids {
        let kept = recommender.recommend(d, meta)?;
        let outcome = outcome_for(d, corpus.on_dataset(d), &kept, config.accounting);
        if outcome.flagged {
            log::warn!("repeat {repeat}: policy {} kept no configuration on `{d}`", policy.name());
        }
        outcomes.push(outcome);
    }
    let perfs: Vec<T> = outcomes.iter().filter_map(|o| o.perf_ratio).collect();
    let times: Vec<T> = outcomes.iter().map(|o| o.time_ratio).collect();
    Ok(RepeatOutcome {
        repeat,
        seed: repeat_seed,
        mean_perf_ratio: mean(&perfs),
        mean_time_ratio: mean(&times).unwrap_or_else(T::one),
        datasets: outcomes,
    })
}

/// Repeated random holdout of datasets. Repeats run in parallel and are
/// reported in index order, so the report depends only on the inputs.
pub fn evaluate_holdout<T: Scalar, P: Policy<T> + ?Sized>(
    corpus: &Corpus<T>,
    meta: &MetaFeatureTable<T>,
    policy: &P,
    config: &HoldoutConfig,
) -> Result<EvaluationReport<T>> {
    if config.repeats == 0 {
        return Err(Error::InvalidParameter("repeats must be at least 1".into()));
    }
    if !(config.test_fraction > 0.0 && config.test_fraction < 1.0) {
        return Err(Error::InvalidParameter(format!("test fraction must lie in (0, 1), got {}", config.test_fraction)));
    }
    if corpus.n_datasets() < 2 {
        return Err(Error::InvalidParameter("need at least two datasets to hold one out".into()));
    }
    let repeats = (0..config.repeats)
        .into_par_iter()
        .map(|r| run_repeat(corpus, meta, policy, config, r))
        .collect::<Result<Vec<_>>>()?;

    let perfs: Vec<T> = repeats.iter().filter_map(|r| r.mean_perf_ratio).collect();
    let times: Vec<T> = repeats.iter().map(|r| r.mean_time_ratio).collect();
    let perf_ci = gaussian_ci(&perfs).ok().map(|c| c.1);
    let time_ci = gaussian_ci(&times).ok().map(|c| c.1);
    let aggregate = Aggregate {
        mean_perf_ratio: mean(&perfs),
        perf_ci_half_width: perf_ci,
        mean_time_ratio: mean(&times).unwrap_or_else(T::one),
        time_ci_half_width: time_ci,
    };
    Ok(EvaluationReport {
        policy: policy.name(),
        param: policy.param(),
        seed: config.seed,
        test_fraction: config.test_fraction,
        flagged: repeats.iter().flat_map(|r| &r.datasets).filter(|d| d.flagged).count(),
        repeats,
        aggregate,
    })
}
