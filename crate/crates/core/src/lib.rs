//! Sequential hyper-parameter space reduction for AutoML configuration spaces.
//!
//! The crate learns, from past runs of an AutoML tool on a corpus of datasets,
//! an ordered sequence of regression-tree filters. Each filter predicts, from a
//! dataset's meta-features, the performance ratio still reachable when one
//! configuration group is removed. Applying the sequence to a new dataset drops
//! the groups whose removal is predicted to be safe.
//!
//! Modules:
//!
//! * [`data`]: run records, group catalog, performance-ratio and time matrices.
//! * [`cart`]: regression trees with cost-complexity pruning and CV tuning.
//! * [`reduction`]: fitting and applying the filter sequence.
//! * [`metafeatures`]: the 27 dataset meta-features and their CSV table.
//! * [`evaluation`]: repeated holdout protocol, subsampling and CIs.
//! * [`baselines`]: random elimination and KNN + adjusted ratio of ratios.
//!
//! All numeric code is generic over [`Scalar`] (`f32` or `f64`). The `*F64`
//! and `*F32` aliases below fix the scalar for callers that do not care.

pub mod baselines;
pub mod cart;
pub mod data;
pub mod error;
pub mod evaluation;
pub mod metafeatures;
pub mod reduction;
mod scalar;
pub mod seed;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type RunRecordF64 = data::RunRecord<f64>;
pub type CorpusF64 = data::Corpus<f64>;
pub type GroupMatrixF64 = data::GroupMatrix<f64>;
pub type RegressionTreeF64 = cart::RegressionTree<f64>;
pub type FilterSequenceF64 = reduction::FilterSequence<f64>;
pub type MetaFeatureTableF64 = metafeatures::MetaFeatureTable<f64>;
pub type MetaFeatureVectorF64 = metafeatures::MetaFeatureVector<f64>;
pub type TabularDatasetF64 = metafeatures::TabularDataset<f64>;
pub type EvaluationReportF64 = evaluation::EvaluationReport<f64>;

pub type RunRecordF32 = data::RunRecord<f32>;
pub type CorpusF32 = data::Corpus<f32>;
pub type GroupMatrixF32 = data::GroupMatrix<f32>;
pub type RegressionTreeF32 = cart::RegressionTree<f32>;
pub type FilterSequenceF32 = reduction::FilterSequence<f32>;
pub type MetaFeatureTableF32 = metafeatures::MetaFeatureTable<f32>;
pub type MetaFeatureVectorF32 = metafeatures::MetaFeatureVector<f32>;
pub type TabularDatasetF32 = metafeatures::TabularDataset<f32>;
pub type EvaluationReportF32 = evaluation::EvaluationReport<f32>;
