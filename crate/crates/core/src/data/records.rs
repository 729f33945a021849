use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::{Error, Result, Scalar};

pub(crate) const RUN_COLUMNS: [&str; 6] =
    ["dataset_id", "config_id", "group_ids", "performance", "time_seconds", "shared_cost_id"];

/// A part of a configuration's run time that other configurations on the same
/// dataset reuse (typically one feature-selection computation).
///
/// In CSV it is written `id@seconds`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SharedCost<T> {
    pub id: String,
    pub seconds: T,
}

/// Result of one configuration on one dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct RunRecord<T> {
    pub dataset_id: String,
    pub config_id: String,
    pub group_ids: BTreeSet<String>,
    /// Higher is better, strictly positive.
    pub performance: T,
    /// Total run time, including any shared part.
    pub time_seconds: T,
    pub shared_cost: Option<SharedCost<T>>,
}

impl<T: Scalar> RunRecord<T> {
    pub fn new(
        dataset_id: impl Into<String>,
        config_id: impl Into<String>,
        groups: impl IntoIterator<Item = impl Into<String>>,
        performance: T,
        time_seconds: T,
    ) -> Self {
        RunRecord {
            dataset_id: dataset_id.into(),
            config_id: config_id.into(),
            group_ids: groups.into_iter().map(Into::into).collect(),
            performance,
            time_seconds,
            shared_cost: None,
        }
    }

    pub fn with_shared_cost(mut self, id: impl Into<String>, seconds: T) -> Self {
        self.shared_cost = Some(SharedCost { id: id.into(), seconds });
        self
    }

    fn check(&self, line: Option<u64>) -> Result<()> {
        if self.dataset_id.is_empty() || self.config_id.is_empty() {
            return Err(Error::invalid(line, "empty dataset_id or config_id"));
        }
        if self.group_ids.is_empty() || self.group_ids.iter().any(String::is_empty) {
            return Err(Error::invalid(line, "group_ids must be a non-empty list of non-empty ids"));
        }
        if !(self.performance.is_finite() && self.performance > T::zero()) {
            return Err(Error::invalid(
                line,
                format!("performance must be finite and > 0, got {}", self.performance),
            ));
        }
        if !(self.time_seconds.is_finite() && self.time_seconds >= T::zero()) {
            return Err(Error::invalid(
                line,
                format!("time_seconds must be finite and >= 0, got {}", self.time_seconds),
            ));
        }
        if let Some(shared) = &self.shared_cost {
            if shared.id.is_empty() {
                return Err(Error::invalid(line, "empty shared cost id"));
            }
            if !(shared.seconds.is_finite()
                && shared.seconds >= T::zero()
                && shared.seconds <= self.time_seconds)
            {
                return Err(Error::invalid(
                    line,
                    format!(
                        "shared cost {} must lie in [0, time_seconds = {}]",
                        shared.seconds, self.time_seconds
                    ),
                ));
            }
        }
        Ok(())
    }
}

/// Checks every record invariant: value domains, unique (dataset, config)
/// keys and one amount per shared cost id within a dataset. `lines` gives
/// the source line of each record for error messages.
pub(crate) fn validate<T: Scalar>(records: &[RunRecord<T>], lines: Option<&[u64]>) -> Result<()> {
    let mut keys = HashSet::with_capacity(records.len());
    let mut shared: BTreeMap<(&str, &str), T> = BTreeMap::new();
    for (i, r) in records.iter().enumerate() {
        let line = lines.map(|l| l[i]);
        r.check(line)?;
        if !keys.insert((r.dataset_id.as_str(), r.config_id.as_str())) {
            return Err(Error::DuplicateRecord {
                dataset: r.dataset_id.clone(),
                config: r.config_id.clone(),
            });
        }
        if let Some(s) = &r.shared_cost {
            let seen = *shared.entry((r.dataset_id.as_str(), s.id.as_str())).or_insert(s.seconds);
            if seen != s.seconds {
                return Err(Error::invalid(
                    line,
                    format!(
                        "shared cost `{}` on dataset `{}` recorded as both {} and {}",
                        s.id, r.dataset_id, seen, s.seconds
                    ),
                ));
            }
        }
    }
    Ok(())
}

/// How shared costs enter time sums.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimeAccounting {
    /// Each shared cost id is paid once per summed set of configurations.
    #[default]
    Deduplicate,
    /// Plain sum of `time_seconds`.
    Naive,
}

/// Total time of a set of records from one dataset.
///
/// With [`TimeAccounting::Deduplicate`] a shared cost appearing on `c`
/// records contributes its amount once instead of `c` times. Records are
/// summed in `config_id` order so the result does not depend on input order.
pub fn pooled_time<'a, T: Scalar>(
    records: impl IntoIterator<Item = &'a RunRecord<T>>,
    accounting: TimeAccounting,
) -> T {
    let mut sorted: Vec<&RunRecord<T>> = records.into_iter().collect();
    sorted.sort_by(|a, b| a.config_id.cmp(&b.config_id));
    let mut total = T::zero();
    let mut seen: HashSet<&str> = HashSet::new();
    for r in sorted {
        let mut own = r.time_seconds;
        if accounting == TimeAccounting::Deduplicate {
            if let Some(s) = &r.shared_cost {
                if !seen.insert(s.id.as_str()) {
                    own = (own - s.seconds).max(T::zero());
                }
            }
        }
        total += own;
    }
    total
}

fn parse_scalar<T: Scalar>(field: &str, column: &str, line: Option<u64>) -> Result<T> {
    field
        .trim()
        .parse::<T>()
        .map_err(|_| Error::invalid(line, format!("cannot parse {column} `{field}` as a number")))
}

fn parse_shared<T: Scalar>(field: &str, line: Option<u64>) -> Result<Option<SharedCost<T>>> {
    let field = field.trim();
    if field.is_empty() {
        return Ok(None);
    }
    let (id, secs) = field.rsplit_once('@').ok_or_else(|| {
        Error::Format(format!(
            "shared_cost_id `{field}` needs the form `id@seconds`{}",
            line.map(|l| format!(" (line {l})")).unwrap_or_default()
        ))
    })?;
    Ok(Some(SharedCost { id: id.trim().to_string(), seconds: parse_scalar(secs, "shared cost", line)? }))
}

/// Reads and validates run-record CSV.
///
/// The header must name `dataset_id,config_id,group_ids,performance,time_seconds`
/// and optionally `shared_cost_id`, in any order. `group_ids` is
/// semicolon-separated.
pub fn load_run_records<T: Scalar, R: Read>(source: R) -> Result<Vec<RunRecord<T>>> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::Headers).from_reader(source);
    let headers = reader.headers()?.clone();
    let mut index = [usize::MAX; 6];
    for (pos, name) in headers.iter().enumerate() {
        let slot = RUN_COLUMNS
            .iter()
            .position(|c| *c == name)
            .ok_or_else(|| Error::Format(format!("unknown column `{name}` in run-record CSV")))?;
        if index[slot] != usize::MAX {
            return Err(Error::Format(format!("column `{name}` appears twice")));
        }
        index[slot] = pos;
    }
    if let Some(missing) = RUN_COLUMNS[..5].iter().zip(index).find(|(_, i)| *i == usize::MAX) {
        return Err(Error::Format(format!("missing required column `{}`", missing.0)));
    }

    let mut records = Vec::new();
    let mut lines = Vec::new();
    for row in reader.records() {
        let row = row?;
        let line = row.position().map(|p| p.line());
        let get = |slot: usize| -> &str {
            if index[slot] == usize::MAX {
                ""
            } else {
                row.get(index[slot]).unwrap_or("")
            }
        };
        let groups: BTreeSet<String> = get(2)
            .split(';')
            .map(str::trim)
            .filter(|g| !g.is_empty())
            .map(str::to_string)
            .collect();
        records.push(RunRecord {
            dataset_id: get(0).trim().to_string(),
            config_id: get(1).trim().to_string(),
            group_ids: groups,
            performance: parse_scalar(get(3), "performance", line)?,
            time_seconds: parse_scalar(get(4), "time_seconds", line)?,
            shared_cost: parse_shared(get(5), line)?,
        });
        lines.push(line.unwrap_or(0));
    }
    validate(&records, Some(&lines))?;
    Ok(records)
}

/// Writes records in the run-record CSV format accepted by [`load_run_records`].
pub fn write_run_records<T: Scalar, W: Write>(records: &[RunRecord<T>], sink: W) -> Result<()> {
    let mut writer = csv::Writer::from_writer(sink);
    writer.write_record(RUN_COLUMNS)?;
    for r in records {
        let groups = r.group_ids.iter().cloned().collect::<Vec<_>>().join(";");
        let shared = r.shared_cost.as_ref().map(|s| format!("{}@{}", s.id, s.seconds)).unwrap_or_default();
        writer.write_record([
            r.dataset_id.as_str(),
            r.config_id.as_str(),
            groups.as_str(),
            &r.performance.to_string(),
            &r.time_seconds.to_string(),
            shared.as_str(),
        ])?;
    }
    writer.flush()?;
    Ok(())
}
