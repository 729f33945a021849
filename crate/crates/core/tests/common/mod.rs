#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use shsr::data::{Corpus, GroupMatrix, RatioMatrix, RunRecord, TimeMatrix};
use shsr::metafeatures::MetaFeatureTable;

pub const SYNTH_GROUPS: [&str; 3] = ["cheap1", "cheap2", "costly"];
pub const SYNTH_DATASETS: usize = 40;
pub const SYNTH_SIGNATURE: usize = 30;
pub const CONFIGS_PER_GROUP: usize = 5;

/// 3 groups x 4 datasets, one constant meta-feature.
pub fn toy() -> (RatioMatrix<f64>, TimeMatrix<f64>, MetaFeatureTable<f64>) {
    let groups: Vec<String> = ["A", "B", "C"].map(String::from).to_vec();
    let datasets: Vec<String> = ["d1", "d2", "d3", "d4"].map(String::from).to_vec();
    let p = [[1.00, 0.90, 1.00, 0.95], [0.98, 1.00, 0.97, 1.00], [0.60, 0.70, 0.65, 0.60]];
    let ratio = GroupMatrix::from_rows(
        groups.clone(),
        datasets.clone(),
        p.iter().map(|r| r.iter().map(|&v| Some(v)).collect()).collect(),
    )
    .unwrap();
    let time =
        GroupMatrix::from_rows(groups, datasets.clone(), [10.0, 20.0, 5.0].iter().map(|&t| vec![Some(t); 4]).collect())
            .unwrap();
    (ratio, time, constant_meta(&datasets))
}

pub fn constant_meta(datasets: &[String]) -> MetaFeatureTable<f64> {
    MetaFeatureTable::new(vec!["constant".into()], datasets.iter().map(|d| (d.clone(), vec![Some(1.0)])).collect())
        .unwrap()
}

/// Synthetic corpus of 40 datasets. On the 30 datasets whose `signature`
/// meta-feature is near 10, `cheap1` holds the best configuration and the
/// expensive group `costly` (about 75% of all run time) is strictly
/// dominated; on the other 10 (`signature` near 0) `costly` is best.
/// `noise` carries no information.
pub fn synthetic(seed: u64) -> (Corpus<f64>, MetaFeatureTable<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut records = Vec::new();
    let mut rows = Vec::new();
    for d in 0..SYNTH_DATASETS {
        let id = format!("syn{d:02}");
        let sig = d < SYNTH_SIGNATURE;
        let best: f64 = rng.gen_range(0.70..0.95);
        let tops = if sig { [1.0, 0.95, 0.90] } else { [0.90, 0.85, 1.0] };
        for (g, group) in SYNTH_GROUPS.iter().enumerate() {
            for c in 0..CONFIGS_PER_GROUP {
                let perf = if c == 0 { best * tops[g] } else { best * tops[g] * rng.gen_range(0.80..0.99) };
                let time = if *group == "costly" { rng.gen_range(5.5..6.5) } else { rng.gen_range(0.9..1.1) };
                records.push(RunRecord::new(id.clone(), format!("{group}-{c}"), [*group], perf, time));
            }
        }
        let signature = if sig { 10.0 } else { 0.0 } + rng.gen_range(-1.0..1.0);
        rows.push((id, vec![Some(signature), Some(rng.gen_range(0.0..1.0))]));
    }
    let meta = MetaFeatureTable::new(vec!["signature".into(), "noise".into()], rows).unwrap();
    (Corpus::new(records).unwrap(), meta)
}

/// Small random corpus with up to 4 groups and 6 datasets, some overlapping
/// memberships, missing runs, tied performances and zero times. Times are
/// multiples of 1/4 so sums are exact.
pub fn random_small_corpus(rng: &mut ChaCha8Rng) -> (Corpus<f64>, MetaFeatureTable<f64>) {
    loop {
        let n_groups = rng.gen_range(1..=4);
        let n_datasets = rng.gen_range(1..=6);
        let groups: Vec<String> = (0..n_groups).map(|g| format!("g{g}")).collect();
        let mut membership: Vec<(String, BTreeSet<String>)> = Vec::new();
        for (g, group) in groups.iter().enumerate() {
            for c in 0..rng.gen_range(1..=3) {
                let mut set = BTreeSet::from([group.clone()]);
                if n_groups > 1 && rng.gen_bool(0.2) {
                    set.insert(groups[(g + 1) % n_groups].clone());
                }
                membership.push((format!("c{g}{c}"), set));
            }
        }
        let mut records = Vec::new();
        for d in 0..n_datasets {
            for (config, set) in &membership {
                if rng.gen_bool(0.8) {
                    let perf = if rng.gen_bool(0.3) { 1.0 } else { f64::from(rng.gen_range(1..=20u32)) / 20.0 };
                    let time = if rng.gen_bool(0.1) { 0.0 } else { f64::from(rng.gen_range(1..=40u32)) / 4.0 };
                    records.push(RunRecord::new(format!("d{d}"), config.clone(), set.iter().cloned(), perf, time));
                }
            }
        }
        if records.is_empty() {
            continue;
        }
        let corpus = Corpus::new(records).unwrap();
        let ids: Vec<String> = corpus.dataset_ids().map(str::to_string).collect();
        return (corpus, constant_meta(&ids));
    }
}

/// One step of the reference loop: group, covered dataset ids, savings.
pub type OracleStep = (String, Vec<String>, f64);

/// Mean of identical values is the value itself; otherwise sum / n in order.
fn oracle_mean(v: &[f64]) -> f64 {
    if v.iter().all(|x| *x == v[0]) {
        v[0]
    } else {
        v.iter().sum::<f64>() / v.len() as f64
    }
}

/// Straightforward reimplementation of the greedy fitting loop in which every
/// per-group model is the mean of its targets. Works from the raw records.
pub fn oracle_sequence(corpus: &Corpus<f64>, threshold: f64) -> Vec<OracleStep> {
    let groups: Vec<String> = corpus.catalog().groups().to_vec();
    let datasets: Vec<String> = corpus.dataset_ids().map(str::to_string).collect();
    // ratio[g][d], time[g][d]
    let mut ratio = vec![vec![None; datasets.len()]; groups.len()];
    let mut time = vec![vec![0.0; datasets.len()]; groups.len()];
    for (di, d) in datasets.iter().enumerate() {
        let recs = corpus.on_dataset(d);
        let best = recs.iter().map(|r| r.performance).fold(f64::NEG_INFINITY, f64::max);
        for (gi, g) in groups.iter().enumerate() {
            let mine: Vec<&RunRecord<f64>> = recs.iter().filter(|r| r.group_ids.contains(g)).collect();
            if mine.is_empty() {
                continue;
            }
            let top = mine.iter().map(|r| r.performance).fold(f64::NEG_INFINITY, f64::max);
            ratio[gi][di] = Some(top / best);
            let mut sorted = mine.clone();
            sorted.sort_by(|a, b| a.config_id.cmp(&b.config_id));
            time[gi][di] = sorted.iter().map(|r| r.time_seconds).sum();
        }
    }
    let mut active: Vec<BTreeSet<usize>> =
        ratio.iter().map(|row| (0..datasets.len()).filter(|&d| row[d].is_some()).collect()).collect();
    let mut steps = Vec::new();
    loop {
        let mut best: Option<(usize, Vec<usize>, f64)> = None;
        for g in 0..groups.len() {
            let mut usable = Vec::new();
            let mut targets = Vec::new();
            for &d in &active[g] {
                let others: Vec<f64> = (0..groups.len()).filter(|&i| i != g).filter_map(|i| ratio[i][d]).collect();
                if let Some(m) = others.iter().copied().reduce(f64::max) {
                    usable.push(d);
                    targets.push(m);
                }
            }
            let (covered, savings) = if usable.is_empty() || oracle_mean(&targets) < threshold {
                (Vec::new(), 0.0)
            } else {
                let s = usable.iter().map(|&d| time[g][d]).sum();
                (usable, s)
            };
            if best.as_ref().is_none_or(|b| savings > b.2) {
                best = Some((g, covered, savings));
            }
        }
        let Some((g, covered, savings)) = best.filter(|b| b.2 > 0.0) else {
            break;
        };
        for d in &covered {
            active[g].remove(d);
        }
        steps.push((groups[g].clone(), covered.iter().map(|&d| datasets[d].clone()).collect(), savings));
    }
    steps
}

pub fn sequence_steps(seq: &shsr::reduction::FilterSequence<f64>) -> Vec<OracleStep> {
    seq.steps.iter().map(|s| (s.group_id.clone(), s.covered_at_fit.clone(), s.time_saved_at_fit)).collect()
}

/// Records keyed by dataset for quick lookups in tests.
pub fn by_dataset(corpus: &Corpus<f64>) -> BTreeMap<String, Vec<RunRecord<f64>>> {
    corpus.dataset_ids().map(|d| (d.to_string(), corpus.on_dataset(d).to_vec())).collect()
}
