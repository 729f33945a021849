use std::collections::BTreeMap;

use super::{MetaFeatureVector, TabularDataset, TaskKind};
use crate::Scalar;

/// The 14 counting measures. Class-balance measures exist only for
/// binary-classification targets. With no numerical features the
/// categorical-to-numerical ratio divides by 1.
pub fn extract_simple<T: Scalar>(ds: &TabularDataset<T>) -> MetaFeatureVector<T> {
    let mut v = MetaFeatureVector::missing();
    let n = ds.n_rows();
    let cols = ds.columns();
    let f = cols.len();
    let categorical = cols.iter().filter(|c| c.is_categorical()).count();
    let numerical = f - categorical;

    let mut total_missing = 0usize;
    let mut rows_with_missing = 0usize;
    for row in 0..n {
        let missing = cols.iter().filter(|c| c.is_missing(row)).count();
        total_missing += missing;
        rows_with_missing += usize::from(missing > 0);
    }
    let count = |c: usize| Some(T::from_count(c));
    let frac = |a: usize, b: usize| (b > 0).then(|| T::from_count(a) / T::from_count(b));

    v.set("n_samples", count(n));
    v.set("n_features", count(f));
    v.set("samples_to_features", frac(n, f));
    v.set("total_missing", count(total_missing));
    v.set("total_missing_f", frac(total_missing, n * f));
    v.set("samples_with_any_missing", count(rows_with_missing));
    v.set("samples_with_any_missing_f", frac(rows_with_missing, n));
    v.set("categorical_features", count(categorical));
    v.set("numerical_features", count(numerical));
    v.set("categorical_to_numerical", frac(categorical, numerical.max(1)));

    if let Some(target) = ds.target().filter(|t| t.task == TaskKind::BinaryClassification) {
        let mut classes: BTreeMap<&str, usize> = BTreeMap::new();
        for label in target.values.iter().flatten() {
            *classes.entry(label.as_str()).or_default() += 1;
        }
        let labelled: usize = classes.values().sum();
        if labelled > 0 {
            let majority = classes.values().copied().max().unwrap_or(0);
            let minority = if classes.len() < 2 { 0 } else { classes.values().copied().min().unwrap_or(0) };
            v.set("target_majority_class_instances", count(majority));
            v.set("target_majority_class_f", frac(majority, labelled));
            v.set("target_minority_class_instances", count(minority));
            v.set("target_minority_class_f", frac(minority, labelled));
        }
    }
    v
}
