//! Run records and the group-level matrices built from them.

mod catalog;
mod corpus;
mod matrix;
mod records;

pub use catalog::GroupCatalog;
pub use corpus::Corpus;
pub use matrix::{build_matrices, init_active, ActiveSets, GroupMatrix, RatioMatrix, TimeMatrix};
pub use records::{load_run_records, pooled_time, write_run_records, RunRecord, SharedCost, TimeAccounting};
pub(crate) use matrix::check_aligned;
