use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::RunRecord;
use crate::{Error, Result, Scalar};

/// The configuration groups of a corpus and which configurations belong to
/// each. Groups are kept in lexicographic order; every tie-break downstream
/// uses this order.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct GroupCatalog {
    groups: Vec<String>,
    membership: BTreeMap<String, BTreeSet<String>>,
}

impl GroupCatalog {
    /// Collects groups and memberships. A configuration must carry the same
    /// group set on every dataset it appears on.
    pub fn from_records<T: Scalar>(records: &[RunRecord<T>]) -> Result<Self> {
        let mut membership: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
        for r in records {
            match membership.get(&r.config_id) {
                Some(existing) if *existing != r.group_ids => {
                    return Err(Error::InconsistentMembership { config: r.config_id.clone() });
                }
                Some(_) => {}
                None => {
                    membership.insert(r.config_id.clone(), r.group_ids.clone());
                }
            }
        }
        Ok(Self::from_membership(membership))
    }

    pub fn from_membership(membership: BTreeMap<String, BTreeSet<String>>) -> Self {
        let groups: BTreeSet<String> = membership.values().flatten().cloned().collect();
        GroupCatalog { groups: groups.into_iter().collect(), membership }
    }

    pub fn groups(&self) -> &[String] {
        &self.groups
    }

    pub fn group_index(&self, group: &str) -> Option<usize> {
        self.groups.binary_search_by(|g| g.as_str().cmp(group)).ok()
    }

    pub fn groups_of(&self, config: &str) -> Option<&BTreeSet<String>> {
        self.membership.get(config)
    }

    pub fn configs(&self) -> impl Iterator<Item = &str> {
        self.membership.keys().map(String::as_str)
    }

    pub fn n_configs(&self) -> usize {
        self.membership.len()
    }

    pub fn membership(&self) -> &BTreeMap<String, BTreeSet<String>> {
        &self.membership
    }
}
