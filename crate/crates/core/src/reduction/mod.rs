//! Fitting and applying the sequence of group filters.
//!
//! Each filter is a regression tree that predicts, from a dataset's
//! meta-features, the best performance ratio reachable without one
//! configuration group. Fitting greedily picks the group whose removal saves
//! the most time on the datasets where that prediction clears the threshold,
//! retires those datasets for the group, and repeats until nothing more can
//! be saved.

mod apply;
mod fit;

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::cart::RegressionTree;
use crate::{Error, Result, Scalar};

pub use apply::{apply_filter, kept_configurations, surviving_configurations, FilterOutcome};
pub use fit::{fit_corpus, fit_shsr, leave_one_out_targets, LooTargets};
pub(crate) use fit::feature_means;

pub const FORMAT_TAG: &str = "shsr-filter-sequence/1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct FilterStep<T> {
    pub group_id: String,
    pub tree: RegressionTree<T>,
    pub covered_at_fit: Vec<String>,
    pub time_saved_at_fit: T,
}

/// Output of fitting: the greedy selection order of group filters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct FilterSequence<T> {
    pub format: String,
    pub threshold: T,
    /// Every group of the training catalog, in catalog order.
    pub groups: Vec<String>,
    pub feature_names: Vec<String>,
    /// Per-feature training means used to fill missing meta-features.
    pub imputation_means: Vec<T>,
    pub steps: Vec<FilterStep<T>>,
}

impl<T: Scalar> FilterSequence<T> {
    pub fn empty(threshold: T, groups: Vec<String>, feature_names: Vec<String>, imputation_means: Vec<T>) -> Self {
        FilterSequence { format: FORMAT_TAG.to_string(), threshold, groups, feature_names, imputation_means, steps: Vec::new() }
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn write_json<W: Write>(&self, mut sink: W) -> Result<()> {
        sink.write_all(self.to_json()?.as_bytes())?;
        Ok(())
    }

    pub fn read_json<R: Read>(source: R) -> Result<Self> {
        let seq: Self = serde_json::from_reader(source)?;
        if seq.format != FORMAT_TAG {
            return Err(Error::Format(format!("expected format `{FORMAT_TAG}`, found `{}`", seq.format)));
        }
        if seq.imputation_means.len() != seq.feature_names.len() {
            return Err(Error::Format("imputation_means and feature_names differ in length".into()));
        }
        if let Some(step) = seq.steps.iter().find(|s| !seq.groups.contains(&s.group_id)) {
            return Err(Error::Format(format!("step group `{}` is not among the sequence groups", step.group_id)));
        }
        Ok(seq)
    }

    /// Fills missing entries of an aligned meta-feature row with the
    /// training means.
    pub fn impute(&self, row: &[Option<T>]) -> Result<Vec<T>> {
        if row.len() != self.feature_names.len() {
            return Err(Error::MissingFeature { index: row.len().min(self.feature_names.len()), len: row.len() });
        }
        Ok(row.iter().zip(&self.imputation_means).map(|(v, m)| v.unwrap_or(*m)).collect())
    }
}
