use std::collections::BTreeSet;
use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::{Error, Result, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskKind {
    BinaryClassification,
    Regression,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ColumnValues<T> {
    Numerical(Vec<Option<T>>),
    Categorical(Vec<Option<String>>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Column<T> {
    pub name: String,
    pub values: ColumnValues<T>,
}

impl<T: Scalar> Column<T> {
    pub fn numerical(name: impl Into<String>, values: Vec<Option<T>>) -> Self {
        Column { name: name.into(), values: ColumnValues::Numerical(values) }
    }

    pub fn categorical(name: impl Into<String>, values: Vec<Option<String>>) -> Self {
        Column { name: name.into(), values: ColumnValues::Categorical(values) }
    }

    pub fn len(&self) -> usize {
        match &self.values {
            ColumnValues::Numerical(v) => v.len(),
            ColumnValues::Categorical(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_categorical(&self) -> bool {
        matches!(self.values, ColumnValues::Categorical(_))
    }

    pub fn is_missing(&self, row: usize) -> bool {
        match &self.values {
            ColumnValues::Numerical(v) => v[row].is_none(),
            ColumnValues::Categorical(v) => v[row].is_none(),
        }
    }
}

/// Prediction target. Labels are kept as strings; only their class counts
/// matter for meta-features.
#[derive(Debug, Clone, PartialEq)]
pub struct Target {
    pub name: String,
    pub task: TaskKind,
    pub values: Vec<Option<String>>,
}

impl Target {
    pub fn new(name: impl Into<String>, task: TaskKind, values: Vec<Option<String>>) -> Self {
        Target { name: name.into(), task, values }
    }
}

/// Feature columns of equal length plus an optional target.
#[derive(Debug, Clone, PartialEq)]
pub struct TabularDataset<T> {
    columns: Vec<Column<T>>,
    target: Option<Target>,
    n_rows: usize,
}

impl<T: Scalar> TabularDataset<T> {
    pub fn new(columns: Vec<Column<T>>, target: Option<Target>) -> Result<Self> {
        let n_rows = columns.first().map(Column::len).or(target.as_ref().map(|t| t.values.len())).unwrap_or(0);
        if n_rows == 0 {
            return Err(Error::InvalidParameter("dataset needs at least one row".into()));
        }
        if columns.iter().any(|c| c.len() != n_rows) || target.as_ref().is_some_and(|t| t.values.len() != n_rows) {
            return Err(Error::InvalidParameter("dataset columns differ in length".into()));
        }
        for c in &columns {
            if let ColumnValues::Numerical(v) = &c.values {
                if v.iter().flatten().any(|x| !x.is_finite()) {
                    return Err(Error::InvalidParameter(format!("column `{}` has non-finite values", c.name)));
                }
            }
        }
        Ok(TabularDataset { columns, target, n_rows })
    }

    pub fn columns(&self) -> &[Column<T>] {
        &self.columns
    }

    pub fn target(&self) -> Option<&Target> {
        self.target.as_ref()
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    /// Reads a CSV file with a header row. Columns listed in
    /// `options.categorical` are categorical; any other column is numerical
    /// when every present cell parses as a finite number.
    pub fn from_csv<R: Read>(source: R, options: &CsvOptions) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(source);
        let headers: Vec<String> = reader.headers()?.iter().map(|h| h.trim().to_string()).collect();
        let mut cells: Vec<Vec<Option<String>>> = vec![Vec::new(); headers.len()];
        for row in reader.records() {
            let row = row?;
            if row.len() != headers.len() {
                return Err(Error::Format(format!("row has {} cells, header has {}", row.len(), headers.len())));
            }
            for (col, cell) in cells.iter_mut().zip(row.iter()) {
                let cell = cell.trim();
                col.push(if CsvOptions::is_missing_token(cell) { None } else { Some(cell.to_string()) });
            }
        }
        if let Some(t) = &options.target {
            if !headers.contains(t) {
                return Err(Error::Format(format!("target column `{t}` not found")));
            }
        }
        let forced: BTreeSet<&str> = options.categorical.iter().map(String::as_str).collect();
        if let Some(bad) = forced.iter().find(|c| !headers.iter().any(|h| h == *c)) {
            return Err(Error::Format(format!("categorical column `{bad}` not found")));
        }
        let mut columns = Vec::new();
        let mut target = None;
        for (name, values) in headers.into_iter().zip(cells) {
            if options.target.as_deref() == Some(name.as_str()) {
                target = Some(Target::new(name, options.task, values));
                continue;
            }
            let parsed: Option<Vec<Option<T>>> = if forced.contains(name.as_str()) {
                None
            } else {
                values
                    .iter()
                    .map(|v| match v {
                        None => Some(None),
                        Some(s) => s.parse::<T>().ok().filter(|x| x.is_finite()).map(Some),
                    })
                    .collect()
            };
            columns.push(match parsed {
                Some(nums) => Column::numerical(name, nums),
                None => Column::categorical(name, values),
            });
        }
        TabularDataset::new(columns, target)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CsvOptions {
    pub target: Option<String>,
    pub task: TaskKind,
    pub categorical: Vec<String>,
}

impl Default for CsvOptions {
    fn default() -> Self {
        CsvOptions { target: None, task: TaskKind::BinaryClassification, categorical: Vec::new() }
    }
}

impl CsvOptions {
    const MISSING: [&'static str; 5] = ["", "na", "nan", "?", "null"];

    fn is_missing_token(cell: &str) -> bool {
        Self::MISSING.iter().any(|m| cell.eq_ignore_ascii_case(m))
    }
}
