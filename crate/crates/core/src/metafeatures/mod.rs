//! Dataset meta-features: 14 simple measures, the silhouette index of
//! k-means for k = 2..=10 and the number of principal components needed to
//! explain 60/70/80/90% of the variance.

mod cluster;
mod dataset;
mod encode;
mod pca;
mod simple;
mod table;

use rand::seq::index;
use serde::{Deserialize, Serialize};

use crate::{seed, Scalar};

pub use cluster::{kmeans, silhouette_index, silhouette_of_points, silhouette_profile, silhouette_score, KMeans};
pub use dataset::{Column, ColumnValues, CsvOptions, TabularDataset, Target, TaskKind};
pub use encode::{encode, Encoded};
pub use pca::{component_count, explained_variance_ratios, pca_component_count};
pub use simple::extract_simple;
pub use table::MetaFeatureTable;

pub const N_META_FEATURES: usize = 27;
pub const N_SIMPLE: usize = 14;
pub const SILHOUETTE_KS: [usize; 9] = [2, 3, 4, 5, 6, 7, 8, 9, 10];
pub const PCA_PERCENTS: [u32; 4] = [60, 70, 80, 90];
/// Rows beyond this are subsampled before clustering.
pub const SILHOUETTE_ROW_CAP: usize = 1000;

pub const META_FEATURE_NAMES: [&str; N_META_FEATURES] = [
    "n_samples",
    "n_features",
    "samples_to_features",
    "total_missing",
    "total_missing_f",
    "samples_with_any_missing",
    "samples_with_any_missing_f",
    "categorical_features",
    "numerical_features",
    "target_majority_class_instances",
    "target_majority_class_f",
    "target_minority_class_instances",
    "target_minority_class_f",
    "categorical_to_numerical",
    "silhouette_2",
    "silhouette_3",
    "silhouette_4",
    "silhouette_5",
    "silhouette_6",
    "silhouette_7",
    "silhouette_8",
    "silhouette_9",
    "silhouette_10",
    "pca_60",
    "pca_70",
    "pca_80",
    "pca_90",
];

/// The 27 meta-features of one dataset, in [`META_FEATURE_NAMES`] order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct MetaFeatureVector<T> {
    pub values: Vec<Option<T>>,
}

impl<T: Scalar> MetaFeatureVector<T> {
    pub fn missing() -> Self {
        MetaFeatureVector { values: vec![None; N_META_FEATURES] }
    }

    pub fn get(&self, name: &str) -> Option<T> {
        META_FEATURE_NAMES.iter().position(|n| *n == name).and_then(|i| self.values[i])
    }

    pub(crate) fn set(&mut self, name: &str, value: Option<T>) {
        let i = META_FEATURE_NAMES.iter().position(|n| *n == name).expect("known meta-feature");
        self.values[i] = value;
    }

    pub fn iter(&self) -> impl Iterator<Item = (&'static str, Option<T>)> + '_ {
        META_FEATURE_NAMES.iter().copied().zip(self.values.iter().copied())
    }
}

/// Computes all 27 meta-features. Deterministic given `seed`.
pub fn extract_all<T: Scalar>(ds: &TabularDataset<T>, seed: u64) -> MetaFeatureVector<T> {
    let mut out = extract_simple(ds);
    let encoded = encode(ds);

    let n = encoded.rows.len();
    let sample: Vec<Vec<T>> = if n > SILHOUETTE_ROW_CAP {
        let mut picked = index::sample(&mut seed::rng(seed::derive(seed, &[0])), n, SILHOUETTE_ROW_CAP).into_vec();
        picked.sort_unstable();
        picked.into_iter().map(|i| encoded.rows[i].clone()).collect()
    } else {
        encoded.rows.clone()
    };
    let silhouettes = silhouette_profile(&sample, &SILHOUETTE_KS, seed::derive(seed, &[1]));
    for (k, s) in SILHOUETTE_KS.iter().zip(silhouettes) {
        out.set(&format!("silhouette_{k}"), s);
    }

    let ratios = explained_variance_ratios(&encoded.rows);
    for p in PCA_PERCENTS {
        let count = if n < 2 { None } else { Some(ratios.as_deref().map_or(1, |r| component_count(r, p))) };
        out.set(&format!("pca_{p}"), count.map(T::from_count));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn regression_ds() -> TabularDataset<f64> {
        let x: Vec<Option<f64>> = (0..30).map(|i| Some((i * 7 % 13) as f64)).collect();
        let z: Vec<Option<f64>> = (0..30).map(|i| Some((i % 5) as f64 * 0.5)).collect();
        let c: Vec<Option<String>> = (0..30).map(|i| Some(["a", "b", "c"][i % 3].to_string())).collect();
        TabularDataset::new(
            vec![
                Column::numerical("x", x),
                Column::numerical("z", z),
                Column::categorical("c", c),
            ],
            Some(Target::new("y", TaskKind::Regression, (0..30).map(|i| Some(i.to_string())).collect())),
        )
        .unwrap()
    }

    #[test]
    fn all_27_present_with_class_measures_missing_for_regression() {
        let v = extract_all(&regression_ds(), 7);
        assert_eq!(v.values.len(), 27);
        let missing: Vec<&str> = v.iter().filter(|(_, x)| x.is_none()).map(|(n, _)| n).collect();
        assert_eq!(
            missing,
            [
                "target_majority_class_instances",
                "target_majority_class_f",
                "target_minority_class_instances",
                "target_minority_class_f"
            ]
        );
    }

    #[test]
    fn extraction_is_deterministic() {
        let ds = regression_ds();
        assert_eq!(extract_all(&ds, 3), extract_all(&ds, 3));
    }

    #[test]
    fn pca_counts_are_monotone_in_percent() {
        let v = extract_all(&regression_ds(), 1);
        let counts: Vec<f64> = PCA_PERCENTS.iter().map(|p| v.get(&format!("pca_{p}")).unwrap()).collect();
        assert!(counts.windows(2).all(|w| w[0] <= w[1]), "{counts:?}");
    }

    #[test]
    fn large_datasets_are_subsampled_for_silhouette() {
        let n = 1500;
        let x: Vec<Option<f64>> = (0..n).map(|i| Some(if i % 2 == 0 { 0.0 } else { 50.0 } + (i % 7) as f64 * 0.01)).collect();
        let ds = TabularDataset::new(vec![Column::numerical("x", x)], None).unwrap();
        let v = extract_all(&ds, 2);
        assert!(v.get("silhouette_2").unwrap() > 0.99);
        assert_eq!(v.get("n_samples"), Some(1500.0));
    }
}
