use std::collections::BTreeMap;
use std::io::{Read, Write};

use super::{MetaFeatureVector, META_FEATURE_NAMES};
use crate::{Error, Result, Scalar};

/// Meta-features of many datasets, keyed by dataset id. Any set of named
/// features is allowed; extracted tables use the 27 standard names.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MetaFeatureTable<T> {
    feature_names: Vec<String>,
    rows: BTreeMap<String, Vec<Option<T>>>,
}

impl<T: Scalar> MetaFeatureTable<T> {
    pub fn new(feature_names: Vec<String>, rows: Vec<(String, Vec<Option<T>>)>) -> Result<Self> {
        let mut table = MetaFeatureTable { feature_names, rows: BTreeMap::new() };
        for (id, row) in rows {
            table.insert(id, row)?;
        }
        Ok(table)
    }

    pub fn standard() -> Self {
        MetaFeatureTable { feature_names: META_FEATURE_NAMES.map(String::from).to_vec(), rows: BTreeMap::new() }
    }

    pub fn insert(&mut self, dataset_id: String, row: Vec<Option<T>>) -> Result<()> {
        if row.len() != self.feature_names.len() {
            return Err(Error::InvalidParameter(format!(
                "row for `{dataset_id}` has {} values, expected {}",
                row.len(),
                self.feature_names.len()
            )));
        }
        if self.rows.insert(dataset_id.clone(), row).is_some() {
            return Err(Error::InvalidValue { line: None, message: format!("duplicate meta-feature row `{dataset_id}`") });
        }
        Ok(())
    }

    pub fn insert_vector(&mut self, dataset_id: String, v: &MetaFeatureVector<T>) -> Result<()> {
        self.insert(dataset_id, v.values.clone())
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    pub fn dataset_ids(&self) -> impl Iterator<Item = &str> {
        self.rows.keys().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn row(&self, dataset_id: &str) -> Option<&[Option<T>]> {
        self.rows.get(dataset_id).map(Vec::as_slice)
    }

    /// Row reordered to `names`; features this table lacks come back missing.
    pub fn aligned_row(&self, dataset_id: &str, names: &[String]) -> Option<Vec<Option<T>>> {
        let row = self.rows.get(dataset_id)?;
        Some(
            names
                .iter()
                .map(|n| self.feature_names.iter().position(|f| f == n).and_then(|i| row[i]))
                .collect(),
        )
    }

    /// Reads `dataset_id` followed by one column per feature; empty cells are
    /// missing.
    pub fn read_csv<R: Read>(source: R) -> Result<Self> {
        let mut reader = csv::Reader::from_reader(source);
        let headers: Vec<String> = reader.headers()?.iter().map(|h| h.trim().to_string()).collect();
        if headers.first().map(String::as_str) != Some("dataset_id") {
            return Err(Error::Format("meta-feature CSV must start with a `dataset_id` column".into()));
        }
        let mut table = MetaFeatureTable { feature_names: headers[1..].to_vec(), rows: BTreeMap::new() };
        for rec in reader.records() {
            let rec = rec?;
            let line = rec.position().map(|p| p.line());
            let id = rec.get(0).unwrap_or("").trim().to_string();
            if id.is_empty() {
                return Err(Error::invalid(line, "empty dataset_id"));
            }
            let values = rec
                .iter()
                .skip(1)
                .zip(&table.feature_names)
                .map(|(cell, name)| {
                    let cell = cell.trim();
                    if cell.is_empty() {
                        return Ok(None);
                    }
                    cell.parse::<T>()
                        .ok()
                        .filter(|v| v.is_finite())
                        .map(Some)
                        .ok_or_else(|| Error::invalid(line, format!("cannot parse {name} `{cell}`")))
                })
                .collect::<Result<Vec<_>>>()?;
            table.insert(id, values).map_err(|e| match e {
                Error::InvalidValue { message, .. } => Error::InvalidValue { line, message },
                other => other,
            })?;
        }
        Ok(table)
    }

    pub fn write_csv<W: Write>(&self, sink: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(sink);
        w.write_record(std::iter::once("dataset_id").chain(self.feature_names.iter().map(String::as_str)))?;
        for (id, row) in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| v.map(|x| x.to_string()).unwrap_or_default()).collect();
            w.write_record(std::iter::once(id.as_str()).chain(cells.iter().map(String::as_str)))?;
        }
        w.flush()?;
        Ok(())
    }
}
