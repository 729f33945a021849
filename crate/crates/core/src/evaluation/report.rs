use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::{Error, Result, Scalar};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct DatasetOutcome<T> {
    pub dataset_id: String,
    /// Best kept performance over best overall; `None` when nothing was kept.
    pub perf_ratio: Option<T>,
    pub time_ratio: T,
    pub kept_configs: usize,
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct RepeatOutcome<T> {
    pub repeat: usize,
    pub seed: u64,
    pub datasets: Vec<DatasetOutcome<T>>,
    pub mean_perf_ratio: Option<T>,
    pub mean_time_ratio: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct Aggregate<T> {
    pub mean_perf_ratio: Option<T>,
    pub perf_ci_half_width: Option<T>,
    pub mean_time_ratio: T,
    pub time_ci_half_width: Option<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct EvaluationReport<T> {
    pub policy: String,
    pub param: String,
    pub seed: u64,
    pub test_fraction: f64,
    /// Held-out datasets on which the policy kept no configuration.
    pub flagged: usize,
    pub repeats: Vec<RepeatOutcome<T>>,
    pub aggregate: Aggregate<T>,
}

pub const TIDY_COLUMNS: [&str; 6] = ["policy", "param", "repeat", "dataset_id", "perf_ratio", "time_ratio"];
pub const PLOT_COLUMNS: [&str; 7] = ["policy", "param", "repeat", "perf_ratio", "time_ratio", "perf_ci", "time_ci"];

/// One line of the plot table: a repeat, or the `mean` row with CI widths.
#[derive(Debug, Clone, PartialEq)]
pub struct PlotRow<T> {
    pub policy: String,
    pub param: String,
    pub repeat: String,
    pub perf_ratio: Option<T>,
    pub time_ratio: T,
    pub perf_ci: Option<T>,
    pub time_ci: Option<T>,
}

fn cell<T: Scalar>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn parse_cell<T: Scalar>(s: &str, column: &str) -> Result<Option<T>> {
    if s.is_empty() {
        return Ok(None);
    }
    s.parse::<T>()
        .map(Some)
        .map_err(|_| Error::Format(format!("cannot parse {column} `{s}`")))
}

impl<T: Scalar> EvaluationReport<T> {
    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn plot_rows(&self) -> Vec<PlotRow<T>> {
        let mut rows: Vec<PlotRow<T>> = self
            .repeats
            .iter()
            .map(|r| PlotRow {
                policy: self.policy.clone(),
                param: self.param.clone(),
                repeat: r.repeat.to_string(),
                perf_ratio: r.mean_perf_ratio,
                time_ratio: r.mean_time_ratio,
                perf_ci: None,
                time_ci: None,
            })
            .collect();
        rows.push(PlotRow {
            policy: self.policy.clone(),
            param: self.param.clone(),
            repeat: "mean".into(),
            perf_ratio: self.aggregate.mean_perf_ratio,
            time_ratio: self.aggregate.mean_time_ratio,
            perf_ci: self.aggregate.perf_ci_half_width,
            time_ci: self.aggregate.time_ci_half_width,
        });
        rows
    }
}

/// Writes one row per (report, repeat, held-out dataset).
pub fn write_tidy_csv<T: Scalar, W: Write>(reports: &[EvaluationReport<T>], sink: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(TIDY_COLUMNS)?;
    for rep in reports {
        for r in &rep.repeats {
            for d in &r.datasets {
                let repeat = r.repeat.to_string();
                let perf = cell(d.perf_ratio);
                let time = d.time_ratio.to_string();
                w.write_record([rep.policy.as_str(), &rep.param, &repeat, &d.dataset_id, &perf, &time])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_plot_csv<T: Scalar, W: Write>(reports: &[EvaluationReport<T>], sink: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(PLOT_COLUMNS)?;
    for row in reports.iter().flat_map(EvaluationReport::plot_rows) {
        w.write_record([
            row.policy,
            row.param,
            row.repeat,
            cell(row.perf_ratio),
            row.time_ratio.to_string(),
            cell(row.perf_ci),
            cell(row.time_ci),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_plot_csv<T: Scalar, R: Read>(source: R) -> Result<Vec<PlotRow<T>>> {
    let mut r = csv::Reader::from_reader(source);
    let header: Vec<&str> = r.headers()?.iter().collect();
    if header != PLOT_COLUMNS {
        return Err(Error::Format(format!("unexpected plot header {header:?}")));
    }
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let time_ratio = parse_cell(&rec[4], "time_ratio")?
            .ok_or_else(|| Error::Format("time_ratio must not be empty".into()))?;
        rows.push(PlotRow {
            policy: rec[0].to_string(),
            param: rec[1].to_string(),
            repeat: rec[2].to_string(),
            perf_ratio: parse_cell(&rec[3], "perf_ratio")?,
            time_ratio,
            perf_ci: parse_cell(&rec[5], "perf_ci")?,
            time_ci: parse_cell(&rec[6], "time_ci")?,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn report() -> EvaluationReport<f64> {
        let d = DatasetOutcome { dataset_id: "d1".into(), perf_ratio: Some(0.1 + 0.2), time_ratio: 1.0 / 3.0, kept_configs: 2, flagged: false };
        EvaluationReport {
            policy: "shsr".into(),
            param: "threshold=0.99".into(),
            seed: 7,
            test_fraction: 0.1,
            flagged: 0,
            repeats: vec![RepeatOutcome { repeat: 0, seed: 1, datasets: vec![d], mean_perf_ratio: Some(0.1 + 0.2), mean_time_ratio: 1.0 / 3.0 }],
            aggregate: Aggregate { mean_perf_ratio: Some(0.1 + 0.2), perf_ci_half_width: None, mean_time_ratio: 1.0 / 3.0, time_ci_half_width: None },
        }
    }

    #[test]
    fn plot_csv_round_trips_exactly() {
        let rep = report();
        let mut buf = Vec::new();
        write_plot_csv(std::slice::from_ref(&rep), &mut buf).unwrap();
        let back: Vec<PlotRow<f64>> = read_plot_csv(buf.as_slice()).unwrap();
        assert_eq!(back, rep.plot_rows());
        assert_eq!(back.last().unwrap().repeat, "mean");
    }

    #[test]
    fn json_round_trips() {
        let rep = report();
        assert_eq!(EvaluationReport::from_json(&rep.to_json().unwrap()).unwrap(), rep);
    }

    #[test]
    fn tidy_csv_has_one_row_per_dataset() {
        let mut buf = Vec::new();
        write_tidy_csv(&[report()], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 2);
        assert!(text.starts_with("policy,param,repeat,dataset_id,perf_ratio,time_ratio"));
    }
}
