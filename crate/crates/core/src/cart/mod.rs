//! CART regression trees: greedy squared-error growth, minimal
//! cost-complexity pruning, and cross-validated tuning of
//! `min_samples_leaf` and the pruning strength.

mod prune;
mod tree;
mod tune;

pub use prune::{prune_path, PruningPath};
pub use tree::{grow_tree, Node, RegressionTree, Split};
pub use tune::{cv_error, tune_and_fit, TreeHyperParams, TunedTree, CV_FOLDS, MIN_SAMPLES_LEAF_GRID};
