use std::collections::{BTreeMap, BTreeSet};

use super::{pooled_time, GroupCatalog, RunRecord, TimeAccounting};
use crate::{Error, Result, Scalar};

/// Dense G×D matrix over (group, dataset) with missing entries.
///
/// Rows follow the catalog's group order and columns are dataset ids in
/// lexicographic order.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupMatrix<T> {
    group_ids: Vec<String>,
    dataset_ids: Vec<String>,
    values: Vec<Option<T>>,
}

/// Performance ratios: best performance of the group over best overall.
pub type RatioMatrix<T> = GroupMatrix<T>;
/// Summed run time of each group's configurations.
pub type TimeMatrix<T> = GroupMatrix<T>;

impl<T: Scalar> GroupMatrix<T> {
    pub fn from_rows(group_ids: Vec<String>, dataset_ids: Vec<String>, rows: Vec<Vec<Option<T>>>) -> Result<Self> {
        if rows.len() != group_ids.len() || rows.iter().any(|r| r.len() != dataset_ids.len()) {
            return Err(Error::InvalidParameter(format!(
                "matrix rows do not match {} groups x {} datasets",
                group_ids.len(),
                dataset_ids.len()
            )));
        }
        Ok(GroupMatrix { group_ids, dataset_ids, values: rows.into_iter().flatten().collect() })
    }

    pub fn n_groups(&self) -> usize {
        self.group_ids.len()
    }

    pub fn n_datasets(&self) -> usize {
        self.dataset_ids.len()
    }

    pub fn group_ids(&self) -> &[String] {
        &self.group_ids
    }

    pub fn dataset_ids(&self) -> &[String] {
        &self.dataset_ids
    }

    pub fn get(&self, group: usize, dataset: usize) -> Option<T> {
        self.values[group * self.dataset_ids.len() + dataset]
    }

    pub fn row(&self, group: usize) -> &[Option<T>] {
        let d = self.dataset_ids.len();
        &self.values[group * d..(group + 1) * d]
    }

    pub fn dataset_index(&self, dataset: &str) -> Option<usize> {
        self.dataset_ids.binary_search_by(|d| d.as_str().cmp(dataset)).ok()
    }

    fn same_shape(&self, other: &Self) -> bool {
        self.group_ids == other.group_ids && self.dataset_ids == other.dataset_ids
    }
}

/// Builds the performance-ratio and time matrices from run records.
///
/// `ratio[g][d]` is the best performance among `g`'s configurations on `d`
/// divided by the best performance of any configuration on `d`; `time[g][d]`
/// is the pooled time of `g`'s configurations on `d`. Entries without
/// underlying records are missing.
pub fn build_matrices<T: Scalar>(
    records: &[RunRecord<T>],
    catalog: &GroupCatalog,
    accounting: TimeAccounting,
) -> Result<(RatioMatrix<T>, TimeMatrix<T>)> {
    let mut by_dataset: BTreeMap<&str, Vec<&RunRecord<T>>> = BTreeMap::new();
    for r in records {
        for g in &r.group_ids {
            if catalog.group_index(g).is_none() {
                return Err(Error::UnknownGroup(g.clone()));
            }
        }
        by_dataset.entry(r.dataset_id.as_str()).or_default().push(r);
    }
    let groups = catalog.groups().to_vec();
    let datasets: Vec<String> = by_dataset.keys().map(|d| d.to_string()).collect();
    let (n_g, n_d) = (groups.len(), datasets.len());
    let mut ratio = vec![None; n_g * n_d];
    let mut time = vec![None; n_g * n_d];

    for (d, recs) in by_dataset.values().enumerate() {
        let best = recs.iter().map(|r| r.performance).fold(T::neg_infinity(), T::max);
        for (g, group) in groups.iter().enumerate() {
            let members: Vec<&RunRecord<T>> = recs.iter().copied().filter(|r| r.group_ids.contains(group)).collect();
            if members.is_empty() {
                continue;
            }
            let group_best = members.iter().map(|r| r.performance).fold(T::neg_infinity(), T::max);
            ratio[g * n_d + d] = Some(group_best / best);
            time[g * n_d + d] = Some(pooled_time(members, accounting));
        }
    }
    Ok((
        GroupMatrix { group_ids: groups.clone(), dataset_ids: datasets.clone(), values: ratio },
        GroupMatrix { group_ids: groups, dataset_ids: datasets, values: time },
    ))
}

/// Per-group sets of dataset column indices still in play.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActiveSets {
    sets: Vec<BTreeSet<usize>>,
}

impl ActiveSets {
    pub fn new(sets: Vec<BTreeSet<usize>>) -> Self {
        ActiveSets { sets }
    }

    pub fn get(&self, group: usize) -> &BTreeSet<usize> {
        &self.sets[group]
    }

    pub fn n_groups(&self) -> usize {
        self.sets.len()
    }

    pub fn remove_all(&mut self, group: usize, datasets: &[usize]) {
        for d in datasets {
            self.sets[group].remove(d);
        }
    }

    pub fn total(&self) -> usize {
        self.sets.iter().map(BTreeSet::len).sum()
    }
}

/// Every group starts active on each dataset where it has a ratio.
pub fn init_active<T: Scalar>(ratio: &RatioMatrix<T>) -> ActiveSets {
    let sets = (0..ratio.n_groups())
        .map(|g| ratio.row(g).iter().enumerate().filter(|(_, v)| v.is_some()).map(|(d, _)| d).collect())
        .collect();
    ActiveSets { sets }
}

pub(crate) fn check_aligned<T: Scalar>(ratio: &RatioMatrix<T>, time: &TimeMatrix<T>) -> Result<()> {
    if !ratio.same_shape(time) {
        return Err(Error::InvalidParameter("ratio and time matrices have different ids".into()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(d: &str, c: &str, g: &str, perf: f64, t: f64) -> RunRecord<f64> {
        RunRecord::new(d, c, [g], perf, t)
    }

    fn build(records: &[RunRecord<f64>]) -> (RatioMatrix<f64>, TimeMatrix<f64>) {
        let cat = GroupCatalog::from_records(records).unwrap();
        build_matrices(records, &cat, TimeAccounting::Deduplicate).unwrap()
    }

    #[test]
    fn ratio_and_time_by_definition() {
        let recs = vec![
            rec("d1", "c1", "A", 1.0, 10.0),
            rec("d1", "c2", "B", 0.98, 20.0),
            rec("d1", "c3", "C", 0.60, 5.0),
        ];
        let (p, e) = build(&recs);
        let col: Vec<_> = (0..3).map(|g| p.get(g, 0).unwrap()).collect();
        assert_eq!(col, [1.0, 0.98, 0.60]);
        let col: Vec<_> = (0..3).map(|g| e.get(g, 0).unwrap()).collect();
        assert_eq!(col, [10.0, 20.0, 5.0]);
    }

    #[test]
    fn group_ratio_uses_its_best_member() {
        let recs = vec![
            RunRecord::new("d1", "c1", ["A", "X"], 0.8f64, 1.0),
            RunRecord::new("d1", "c2", ["A", "Y"], 0.4, 2.0),
            RunRecord::new("d1", "c3", ["B", "Y"], 0.5, 4.0),
        ];
        let (p, e) = build(&recs);
        assert_eq!(p.group_ids(), ["A", "B", "X", "Y"]);
        assert_eq!(p.get(0, 0), Some(1.0));
        assert_eq!(p.get(3, 0), Some(0.5 / 0.8));
        assert_eq!(e.get(0, 0), Some(3.0));
        assert_eq!(e.get(3, 0), Some(6.0));
    }

    #[test]
    fn absent_group_is_missing_and_inactive() {
        let mut recs = Vec::new();
        for d in ["d1", "d2", "d3", "d4"] {
            recs.push(rec(d, "a", "A", 0.9, 1.0));
            recs.push(rec(d, "b", "B", 0.8, 1.0));
            if d != "d4" {
                recs.push(rec(d, "c", "C", 0.7, 1.0));
            }
        }
        let (p, e) = build(&recs);
        assert_eq!(p.get(2, 3), None);
        assert_eq!(e.get(2, 3), None);
        let active = init_active(&p);
        assert_eq!(active.get(0), &BTreeSet::from([0, 1, 2, 3]));
        assert_eq!(active.get(2), &BTreeSet::from([0, 1, 2]));
    }

    #[test]
    fn shared_cost_is_counted_once_per_group() {
        let recs = vec![
            RunRecord::new("d1", "c1", ["g"], 0.9f64, 10.0).with_shared_cost("s", 7.0),
            RunRecord::new("d1", "c2", ["g"], 0.8, 10.0).with_shared_cost("s", 7.0),
            RunRecord::new("d1", "c3", ["h"], 0.8, 10.0).with_shared_cost("s", 7.0),
        ];
        let (_, e) = build(&recs);
        // Oracle: 7 shared + 3 + 3 own = 13.
        assert_eq!(e.get(0, 0), Some(13.0));
        assert_eq!(e.get(1, 0), Some(10.0));
        let cat = GroupCatalog::from_records(&recs).unwrap();
        let (_, naive) = build_matrices(&recs, &cat, TimeAccounting::Naive).unwrap();
        assert_eq!(naive.get(0, 0), Some(20.0));
    }

    #[test]
    fn empty_input_gives_empty_matrices() {
        let (p, _) = build(&[]);
        assert_eq!(p.n_datasets(), 0);
        assert_eq!(init_active(&p).total(), 0);
    }

    #[test]
    fn unknown_group_is_rejected() {
        let recs = vec![rec("d1", "c1", "A", 0.9, 1.0)];
        let cat = GroupCatalog::default();
        assert!(matches!(
            build_matrices(&recs, &cat, TimeAccounting::Naive),
            Err(Error::UnknownGroup(_))
        ));
    }
}
