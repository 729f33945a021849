//! Repeated-holdout evaluation of configuration-filtering policies.
//!
//! Each repeat holds out a seeded random share of the datasets, fits the
//! policy on the rest and measures, per held-out dataset, the best kept
//! performance over the best overall and the kept run time over the total.

mod ci;
mod holdout;
mod policy;
mod report;
mod subsample;

pub use ci::{gaussian_ci, Z_95};
pub use holdout::{evaluate_holdout, outcome_for, split_datasets, HoldoutConfig};
pub use policy::{IdentityPolicy, Policy, Recommender, ShsrPolicy};
pub use report::{
    read_plot_csv, write_plot_csv, write_tidy_csv, Aggregate, DatasetOutcome, EvaluationReport, PlotRow,
    RepeatOutcome, PLOT_COLUMNS, TIDY_COLUMNS,
};
pub use subsample::subsample_results;

/// Threshold sweep used for threshold-trade-off studies.
pub const THRESHOLD_SWEEP: [f64; 5] = [0.95, 0.97, 0.99, 0.999, 0.9999];
/// Result fractions used for partial-results studies.
pub const SUBSAMPLE_SWEEP: [f64; 5] = [0.2, 0.4, 0.6, 0.8, 1.0];
/// Default number of holdout repeats.
pub const DEFAULT_REPEATS: usize = 20;
/// Default share of datasets held out per repeat.
pub const DEFAULT_TEST_FRACTION: f64 = 0.1;
