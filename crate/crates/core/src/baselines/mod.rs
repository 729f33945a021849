//! Comparison policies: uniform random elimination of configurations, and a
//! nearest-neighbour ranking by adjusted ratio of ratios (ARR) over the most
//! similar training datasets.

mod arr;
mod knn;
mod random;

pub use arr::{arr_score, ArrScore, ARR_DENOMINATOR_FLOOR};
pub use knn::{knn_recommend, ArrParams, KnnArrModel, KnnArrPolicy};
pub use random::{chance_of_keeping_optimal, exact_chance_of_keeping_optimal, random_elimination, RandomEliminationPolicy};

/// Shares of configurations removed in random-elimination sweeps.
pub const REMOVAL_SWEEP: [f64; 8] = [0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.97, 0.99];
pub const NEIGHBOR_GRID: [usize; 3] = [1, 3, 10];
pub const ACC_D_GRID: [f64; 3] = [0.001, 0.01, 0.1];
/// Kept-configuration counts swept for classification corpora.
pub const TOP_M_CLASSIFICATION: [usize; 7] = [100, 300, 500, 1000, 1500, 2000, 2500];
/// Kept-configuration counts swept for regression corpora.
pub const TOP_M_REGRESSION: [usize; 6] = [100, 500, 1000, 2000, 4000, 6000];
