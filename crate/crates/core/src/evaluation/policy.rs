use std::collections::BTreeSet;

use crate::data::{Corpus, GroupCatalog, TimeAccounting};
use crate::metafeatures::MetaFeatureTable;
use crate::reduction::{apply_filter, fit_corpus, surviving_configurations, FilterSequence};
use crate::{seed, Error, Result, Scalar};

use super::subsample_results;

/// A way of choosing which configurations to run on a new dataset, learned
/// from a training corpus.
pub trait Policy<T: Scalar>: Sync {
    fn name(&self) -> String;
    /// Parameter label used in reports, e.g. `threshold=0.999`.
    fn param(&self) -> String;
    /// `space` is the full configuration space; recommendations are drawn
    /// from it.
    fn fit<'a>(
        &'a self,
        train: &'a Corpus<T>,
        meta: &'a MetaFeatureTable<T>,
        space: &'a GroupCatalog,
        seed: u64,
    ) -> Result<Box<dyn Recommender<T> + 'a>>;
}

pub trait Recommender<T: Scalar> {
    fn recommend(&self, dataset_id: &str, meta: &MetaFeatureTable<T>) -> Result<BTreeSet<String>>;
}

/// Runs every configuration.
#[derive(Debug, Clone, Copy, Default)]
pub struct IdentityPolicy;

struct KeepAll<'a>(&'a GroupCatalog);

impl<T: Scalar> Recommender<T> for KeepAll<'_> {
    fn recommend(&self, _: &str, _: &MetaFeatureTable<T>) -> Result<BTreeSet<String>> {
        Ok(self.0.configs().map(str::to_string).collect())
    }
}

impl<T: Scalar> Policy<T> for IdentityPolicy {
    fn name(&self) -> String {
        "identity".into()
    }

    fn param(&self) -> String {
        String::new()
    }

    fn fit<'a>(
        &'a self,
        _: &'a Corpus<T>,
        _: &'a MetaFeatureTable<T>,
        space: &'a GroupCatalog,
        _: u64,
    ) -> Result<Box<dyn Recommender<T> + 'a>> {
        Ok(Box::new(KeepAll(space)))
    }
}

/// Fits a filter sequence on the training corpus (optionally on a random
/// share of its results) and keeps every configuration none of whose groups
/// the filters drop.
#[derive(Debug, Clone, Copy)]
pub struct ShsrPolicy<T> {
    pub threshold: T,
    pub subsample: Option<T>,
    pub accounting: TimeAccounting,
}

impl<T: Scalar> ShsrPolicy<T> {
    pub fn new(threshold: T) -> Self {
        ShsrPolicy { threshold, subsample: None, accounting: TimeAccounting::Deduplicate }
    }

    pub fn with_subsample(mut self, fraction: T) -> Self {
        self.subsample = Some(fraction);
        self
    }
}

struct ShsrRecommender<'a, T> {
    sequence: FilterSequence<T>,
    space: &'a GroupCatalog,
}

impl<T: Scalar> Recommender<T> for ShsrRecommender<'_, T> {
    fn recommend(&self, dataset_id: &str, meta: &MetaFeatureTable<T>) -> Result<BTreeSet<String>> {
        let row = meta
            .aligned_row(dataset_id, &self.sequence.feature_names)
            .ok_or_else(|| Error::MissingMetaFeatures(dataset_id.to_string()))?;
        let outcome = apply_filter(&self.sequence, &row)?;
        Ok(surviving_configurations(&outcome.dropped, self.space))
    }
}

impl<T: Scalar> Policy<T> for ShsrPolicy<T> {
    fn name(&self) -> String {
        "shsr".into()
    }

    fn param(&self) -> String {
        match self.subsample {
            Some(f) => format!("threshold={};subsample={f}", self.threshold),
            None => format!("threshold={}", self.threshold),
        }
    }

    fn fit<'a>(
        &'a self,
        train: &'a Corpus<T>,
        meta: &'a MetaFeatureTable<T>,
        space: &'a GroupCatalog,
        seed: u64,
    ) -> Result<Box<dyn Recommender<T> + 'a>> {
        let sequence = match self.subsample {
            Some(f) => {
                let part = Corpus::new(subsample_results(train.records(), f, seed::derive(seed, &[1]))?)?;
                fit_corpus(&part, meta, self.threshold, seed, self.accounting)?
            }
            None => fit_corpus(train, meta, self.threshold, seed, self.accounting)?,
        };
        Ok(Box::new(ShsrRecommender { sequence, space }))
    }
}
