use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::FilterSequence;
use crate::data::GroupCatalog;
use crate::{Result, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FilterOutcome {
    /// Dropped groups, in drop order.
    pub dropped: Vec<String>,
    /// Remaining groups, in catalog order. Never empty when the sequence
    /// has at least one group.
    pub kept: Vec<String>,
    /// A step was skipped because it would have removed the last group.
    pub safeguard_triggered: bool,
}

/// Applies the filters in order to one dataset's meta-features (aligned to
/// `seq.feature_names`, missing entries imputed with the training means).
/// A step drops its group when the tree predicts at least the threshold,
/// unless that would leave no group at all.
pub fn apply_filter<T: Scalar>(seq: &FilterSequence<T>, x_new: &[Option<T>]) -> Result<FilterOutcome> {
    let x = seq.impute(x_new)?;
    let mut dropped: Vec<String> = Vec::new();
    let mut safeguard_triggered = false;
    for step in &seq.steps {
        if dropped.contains(&step.group_id) {
            continue;
        }
        if step.tree.predict(&x)? < seq.threshold {
            continue;
        }
        if dropped.len() + 1 >= seq.groups.len() {
            safeguard_triggered = true;
            continue;
        }
        dropped.push(step.group_id.clone());
    }
    let kept = seq.groups.iter().filter(|g| !dropped.contains(g)).cloned().collect();
    Ok(FilterOutcome { dropped, kept, safeguard_triggered })
}

/// Configurations all of whose groups were kept.
pub fn kept_configurations(kept: &[String], catalog: &GroupCatalog) -> BTreeSet<String> {
    let kept: BTreeSet<&str> = kept.iter().map(String::as_str).collect();
    catalog
        .membership()
        .iter()
        .filter(|(_, groups)| groups.iter().all(|g| kept.contains(g.as_str())))
        .map(|(c, _)| c.clone())
        .collect()
}

/// Configurations none of whose groups is in `dropped`. Unlike
/// [`kept_configurations`], groups the filters never saw stay in.
pub fn surviving_configurations(dropped: &[String], catalog: &GroupCatalog) -> BTreeSet<String> {
    catalog
        .membership()
        .iter()
        .filter(|(_, groups)| !groups.iter().any(|g| dropped.contains(g)))
        .map(|(c, _)| c.clone())
        .collect()
}
