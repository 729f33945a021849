use std::collections::BTreeSet;

use rand::seq::SliceRandom;

use crate::data::{Corpus, GroupCatalog};
use crate::evaluation::{Policy, Recommender};
use crate::metafeatures::MetaFeatureTable;
use crate::scalar::floor_count;
use crate::{seed, Error, Result, Scalar};

/// Removes `floor(fraction * K)` of the `K` configurations uniformly at
/// random, never all of them.
pub fn random_elimination<S: AsRef<str>>(configs: &[S], fraction: f64, seed: u64) -> Result<BTreeSet<String>> {
    if !(0.0..1.0).contains(&fraction) {
        return Err(Error::InvalidParameter(format!("removal fraction must lie in [0, 1), got {fraction}")));
    }
    let mut ids: Vec<&str> = configs.iter().map(AsRef::as_ref).collect();
    ids.sort_unstable();
    ids.dedup();
    let n_remove = floor_count(fraction, ids.len()).min(ids.len().saturating_sub(1));
    ids.shuffle(&mut seed::rng(seed));
    Ok(ids[n_remove..].iter().map(|s| s.to_string()).collect())
}

/// `1 - (1 - n_optimal / n_configs)^n_kept`: chance that at least one of
/// `n_kept` draws with replacement hits an optimal configuration.
pub fn chance_of_keeping_optimal(n_configs: usize, n_optimal: usize, n_kept: usize) -> f64 {
    1.0 - (1.0 - n_optimal as f64 / n_configs as f64).powf(n_kept as f64)
}

/// Same chance for draws without replacement:
/// `1 - C(K - o, k) / C(K, k)`.
pub fn exact_chance_of_keeping_optimal(n_configs: usize, n_optimal: usize, n_kept: usize) -> f64 {
    if n_kept + n_optimal > n_configs {
        return 1.0;
    }
    let miss: f64 = (0..n_kept)
        .map(|i| ((n_configs - n_optimal - i) as f64 / (n_configs - i) as f64).ln())
        .sum();
    1.0 - miss.exp()
}

/// Random elimination as an evaluation policy. Each held-out dataset gets
/// its own draw, seeded from the fit seed and the dataset id.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomEliminationPolicy {
    pub fraction: f64,
}

struct RandomRecommender<'a> {
    configs: Vec<&'a str>,
    fraction: f64,
    seed: u64,
}

impl<T: Scalar> Recommender<T> for RandomRecommender<'_> {
    fn recommend(&self, dataset_id: &str, _: &MetaFeatureTable<T>) -> Result<BTreeSet<String>> {
        random_elimination(&self.configs, self.fraction, seed::derive(self.seed, &[seed::hash_str(dataset_id)]))
    }
}

impl<T: Scalar> Policy<T> for RandomEliminationPolicy {
    fn name(&self) -> String {
        "random".into()
    }

    fn param(&self) -> String {
        format!("fraction={}", self.fraction)
    }

    fn fit<'a>(
        &'a self,
        _: &'a Corpus<T>,
        _: &'a MetaFeatureTable<T>,
        space: &'a GroupCatalog,
        seed: u64,
    ) -> Result<Box<dyn Recommender<T> + 'a>> {
        if !(0.0..1.0).contains(&self.fraction) {
            return Err(Error::InvalidParameter(format!("removal fraction must lie in [0, 1), got {}", self.fraction)));
        }
        Ok(Box::new(RandomRecommender { configs: space.configs().collect(), fraction: self.fraction, seed }))
    }
}
