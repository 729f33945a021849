use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;

use super::arr::arr_score;
use crate::data::{Corpus, GroupCatalog, RunRecord};
use crate::evaluation::{Policy, Recommender};
use crate::metafeatures::MetaFeatureTable;
use crate::reduction::feature_means;
use crate::{Error, Result, Scalar};

/// Performances and times are floored here before entering ARR, so that a
/// zero score or an instantaneous run cannot produce infinities.
const PERF_FLOOR: f64 = 1e-12;
const TIME_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArrParams<T> {
    pub n_neighbors: usize,
    pub acc_d: T,
    pub top_m: usize,
}

impl<T: Scalar> ArrParams<T> {
    pub fn validate(&self) -> Result<()> {
        if self.n_neighbors == 0 {
            return Err(Error::InvalidParameter("n_neighbors must be at least 1".into()));
        }
        if self.top_m == 0 {
            return Err(Error::InvalidParameter("top_m must be at least 1".into()));
        }
        if !(self.acc_d >= T::zero() && self.acc_d.is_finite()) {
            return Err(Error::InvalidParameter(format!("acc_d must be finite and non-negative, got {}", self.acc_d)));
        }
        Ok(())
    }
}

/// Training side of the KNN + ARR ranking: normalised meta-features of the
/// training datasets and, per dataset, each configuration's mean ARR
/// against the other configurations run there.
#[derive(Debug, Clone)]
pub struct KnnArrModel<T> {
    feature_names: Vec<String>,
    used: Vec<usize>,
    means: Vec<T>,
    sds: Vec<T>,
    datasets: Vec<String>,
    points: Vec<Vec<T>>,
    scores: Vec<BTreeMap<String, T>>,
    configs: Vec<String>,
    clamped: usize,
}

fn dataset_scores<T: Scalar>(records: &[RunRecord<T>], acc_d: T) -> (BTreeMap<String, T>, usize) {
    let floor = |v: T, f: f64| v.max(T::lit(f));
    let mut clamped = 0;
    let mut out = BTreeMap::new();
    for p in records {
        if records.len() == 1 {
            out.insert(p.config_id.clone(), T::one());
            break;
        }
        let mut sum = T::zero();
        for q in records.iter().filter(|q| q.config_id != p.config_id) {
            let s = arr_score(
                floor(p.performance, PERF_FLOOR),
                floor(q.performance, PERF_FLOOR),
                floor(p.time_seconds, TIME_FLOOR),
                floor(q.time_seconds, TIME_FLOOR),
                acc_d,
            );
            clamped += usize::from(s.clamped);
            sum += s.value;
        }
        out.insert(p.config_id.clone(), sum / T::from_count(records.len() - 1));
    }
    (out, clamped)
}

impl<T: Scalar> KnnArrModel<T> {
    pub fn fit(train: &Corpus<T>, meta: &MetaFeatureTable<T>, acc_d: T) -> Result<Self> {
        if train.n_datasets() == 0 {
            return Err(Error::EmptyTrainingSet);
        }
        let datasets: Vec<String> = train.dataset_ids().map(str::to_string).collect();
        let raw: Vec<&[Option<T>]> = datasets
            .iter()
            .map(|d| meta.row(d).ok_or_else(|| Error::MissingMetaFeatures(d.clone())))
            .collect::<Result<_>>()?;
        let n_features = meta.n_features();
        let all_means = feature_means(&raw, n_features);
        let imputed: Vec<Vec<T>> =
            raw.iter().map(|r| r.iter().zip(&all_means).map(|(v, m)| v.unwrap_or(*m)).collect()).collect();
        let mut used = Vec::new();
        let mut means = Vec::new();
        let mut sds = Vec::new();
        for f in 0..n_features {
            let col = imputed.iter().map(|r| r[f]);
            let (lo, hi) = col.clone().fold((T::infinity(), T::neg_infinity()), |(lo, hi), v| (lo.min(v), hi.max(v)));
            if hi <= lo {
                continue;
            }
            let m = all_means[f];
            let var = col.map(|v| (v - m) * (v - m)).sum::<T>() / T::from_count(imputed.len());
            used.push(f);
            means.push(m);
            sds.push(var.sqrt());
        }
        let points = imputed
            .iter()
            .map(|r| used.iter().enumerate().map(|(k, &f)| (r[f] - means[k]) / sds[k]).collect())
            .collect();
        let per_dataset: Vec<(BTreeMap<String, T>, usize)> =
            datasets.par_iter().map(|d| dataset_scores(train.on_dataset(d), acc_d)).collect();
        let clamped = per_dataset.iter().map(|p| p.1).sum();
        if clamped > 0 {
            log::warn!("{clamped} ARR denominators were clamped");
        }
        Ok(KnnArrModel {
            feature_names: meta.feature_names().to_vec(),
            used,
            means,
            sds,
            datasets,
            points,
            scores: per_dataset.into_iter().map(|p| p.0).collect(),
            configs: train.catalog().configs().map(str::to_string).collect(),
            clamped,
        })
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    /// Number of pairwise scores whose denominator had to be clamped.
    pub fn clamped(&self) -> usize {
        self.clamped
    }

    /// Training dataset ids of the `n` nearest neighbours, nearest first;
    /// equal distances go to the smaller dataset id.
    pub fn neighbors(&self, x_new: &[Option<T>], n: usize) -> Result<Vec<&str>> {
        Ok(self.neighbor_indices(x_new, n)?.into_iter().map(|i| self.datasets[i].as_str()).collect())
    }

    fn neighbor_indices(&self, x_new: &[Option<T>], n: usize) -> Result<Vec<usize>> {
        if x_new.len() != self.feature_names.len() {
            return Err(Error::InvalidParameter(format!(
                "query has {} meta-features, model expects {}",
                x_new.len(),
                self.feature_names.len()
            )));
        }
        let z: Vec<T> = self
            .used
            .iter()
            .enumerate()
            .map(|(k, &f)| x_new[f].map_or(T::zero(), |v| (v - self.means[k]) / self.sds[k]))
            .collect();
        let mut dist: Vec<(T, usize)> = self
            .points
            .iter()
            .enumerate()
            .map(|(i, p)| (p.iter().zip(&z).map(|(a, b)| (*a - *b) * (*a - *b)).sum::<T>(), i))
            .collect();
        dist.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal).then(a.1.cmp(&b.1)));
        Ok(dist.into_iter().take(n).map(|d| d.1).collect())
    }

    /// All training configurations ranked for `x_new`: by geometric mean
    /// over the neighbours that ran them of their mean ARR there, best first.
    /// Configurations run on none of the neighbours come last.
    pub fn rank(&self, x_new: &[Option<T>], n_neighbors: usize) -> Result<Vec<String>> {
        let nbrs = self.neighbor_indices(x_new, n_neighbors)?;
        let mut scored: Vec<(&str, Option<T>)> = self
            .configs
            .iter()
            .map(|c| {
                let logs: Vec<T> = nbrs.iter().filter_map(|&i| self.scores[i].get(c)).map(|s| s.ln()).collect();
                let score = (!logs.is_empty()).then(|| (logs.iter().copied().sum::<T>() / T::from_count(logs.len())).exp());
                (c.as_str(), score)
            })
            .collect();
        scored.sort_by(|a, b| {
            let by_score = match (a.1, b.1) {
                (Some(x), Some(y)) => y.partial_cmp(&x).unwrap_or(Ordering::Equal),
                (Some(_), None) => Ordering::Less,
                (None, Some(_)) => Ordering::Greater,
                (None, None) => Ordering::Equal,
            };
            by_score.then(a.0.cmp(b.0))
        });
        Ok(scored.into_iter().map(|s| s.0.to_string()).collect())
    }

    pub fn recommend(&self, x_new: &[Option<T>], n_neighbors: usize, top_m: usize) -> Result<Vec<String>> {
        let mut ranked = self.rank(x_new, n_neighbors)?;
        ranked.truncate(top_m);
        Ok(ranked)
    }
}

/// The `top_m` best-ranked configurations for a new dataset with
/// meta-features `x_new` (aligned to `meta`'s feature names), best first.
pub fn knn_recommend<T: Scalar>(
    train: &Corpus<T>,
    meta: &MetaFeatureTable<T>,
    x_new: &[Option<T>],
    params: &ArrParams<T>,
) -> Result<Vec<String>> {
    params.validate()?;
    KnnArrModel::fit(train, meta, params.acc_d)?.recommend(x_new, params.n_neighbors, params.top_m)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KnnArrPolicy<T> {
    pub params: ArrParams<T>,
}

struct KnnRecommender<'a, T> {
    model: KnnArrModel<T>,
    params: ArrParams<T>,
    space: &'a GroupCatalog,
}

impl<T: Scalar> Recommender<T> for KnnRecommender<'_, T> {
    fn recommend(&self, dataset_id: &str, meta: &MetaFeatureTable<T>) -> Result<BTreeSet<String>> {
        let row = meta
            .aligned_row(dataset_id, self.model.feature_names())
            .ok_or_else(|| Error::MissingMetaFeatures(dataset_id.to_string()))?;
        let mut ranked = self.model.rank(&row, self.params.n_neighbors)?;
        let known: BTreeSet<String> = ranked.iter().cloned().collect();
        ranked.extend(self.space.configs().filter(|c| !known.contains(*c)).map(str::to_string));
        Ok(ranked.into_iter().take(self.params.top_m).collect())
    }
}

impl<T: Scalar> Policy<T> for KnnArrPolicy<T> {
    fn name(&self) -> String {
        "knn".into()
    }

    fn param(&self) -> String {
        format!("neighbors={};accd={};top_m={}", self.params.n_neighbors, self.params.acc_d, self.params.top_m)
    }

    fn fit<'a>(
        &'a self,
        train: &'a Corpus<T>,
        meta: &'a MetaFeatureTable<T>,
        space: &'a GroupCatalog,
        _: u64,
    ) -> Result<Box<dyn Recommender<T> + 'a>> {
        self.params.validate()?;
        let model = KnnArrModel::fit(train, meta, self.params.acc_d)?;
        Ok(Box::new(KnnRecommender { model, params: self.params, space }))
    }
}
