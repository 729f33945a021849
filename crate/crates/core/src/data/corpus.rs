use std::collections::{BTreeMap, BTreeSet};
use std::ops::Range;

use super::records::validate;
use super::{build_matrices, GroupCatalog, RatioMatrix, RunRecord, TimeAccounting, TimeMatrix};
use crate::{Result, Scalar};

/// A validated collection of run records, sorted by (dataset, config), with
/// its group catalog.
#[derive(Debug, Clone)]
pub struct Corpus<T> {
    records: Vec<RunRecord<T>>,
    catalog: GroupCatalog,
    by_dataset: BTreeMap<String, Range<usize>>,
}

impl<T: Scalar> Corpus<T> {
    pub fn new(mut records: Vec<RunRecord<T>>) -> Result<Self> {
        validate(&records, None)?;
        records.sort_by(|a, b| (&a.dataset_id, &a.config_id).cmp(&(&b.dataset_id, &b.config_id)));
        let catalog = GroupCatalog::from_records(&records)?;
        let mut by_dataset: BTreeMap<String, Range<usize>> = BTreeMap::new();
        for (i, r) in records.iter().enumerate() {
            by_dataset.entry(r.dataset_id.clone()).and_modify(|range| range.end = i + 1).or_insert(i..i + 1);
        }
        Ok(Corpus { records, catalog, by_dataset })
    }

    pub fn records(&self) -> &[RunRecord<T>] {
        &self.records
    }

    pub fn catalog(&self) -> &GroupCatalog {
        &self.catalog
    }

    pub fn dataset_ids(&self) -> impl Iterator<Item = &str> {
        self.by_dataset.keys().map(String::as_str)
    }

    pub fn n_datasets(&self) -> usize {
        self.by_dataset.len()
    }

    pub fn on_dataset(&self, dataset: &str) -> &[RunRecord<T>] {
        self.by_dataset.get(dataset).map(|r| &self.records[r.clone()]).unwrap_or(&[])
    }

    /// Corpus restricted to `datasets`. The catalog is rebuilt from the
    /// remaining records.
    pub fn restrict(&self, datasets: &BTreeSet<&str>) -> Self {
        let records: Vec<RunRecord<T>> = self
            .by_dataset
            .iter()
            .filter(|(d, _)| datasets.contains(d.as_str()))
            .flat_map(|(_, range)| self.records[range.clone()].iter().cloned())
            .collect();
        Corpus::new(records).expect("subset of a valid corpus is valid")
    }

    pub fn matrices(&self, accounting: TimeAccounting) -> Result<(RatioMatrix<T>, TimeMatrix<T>)> {
        build_matrices(&self.records, &self.catalog, accounting)
    }
}
