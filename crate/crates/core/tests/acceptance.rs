//! Acceptance suite. Prints one PASS/FAIL line per check, grouped by
//! criterion, and exits non-zero when a check fails unexpectedly.
//!
//! Two checks pin reference constants that disagree with their own closed
//! forms; they are kept verbatim and reported as FAIL. They are listed in
//! `KNOWN_UNATTAINABLE` and do not fail the process unless
//! `SHSR_ACCEPTANCE_STRICT=1` is set.

mod common;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use shsr::baselines::{arr_score, chance_of_keeping_optimal, random_elimination, REMOVAL_SWEEP};
use shsr::cart::{grow_tree, prune_path};
use shsr::data::{init_active, Corpus, GroupCatalog, TimeAccounting};
use shsr::evaluation::{
    evaluate_holdout, HoldoutConfig, IdentityPolicy, Policy, Recommender, ShsrPolicy, SUBSAMPLE_SWEEP,
};
use shsr::metafeatures::{
    extract_all, pca_component_count, silhouette_of_points, Column, MetaFeatureTable, TabularDataset, Target,
    TaskKind, META_FEATURE_NAMES, N_META_FEATURES, PCA_PERCENTS,
};
use shsr::reduction::{fit_corpus, fit_shsr};
use shsr::seed;

const KNOWN_UNATTAINABLE: [&str; 2] = ["4.silhouette-reference", "5.probability-reference"];

type Criterion = fn(&mut Suite);

struct Suite {
    unexpected: Vec<String>,
    known: Vec<String>,
}

impl Suite {
    fn check(&mut self, id: &str, pass: bool, detail: String) {
        println!("{} [{id}] {detail}", if pass { "PASS" } else { "FAIL" });
        if !pass {
            if KNOWN_UNATTAINABLE.contains(&id) {
                self.known.push(id.to_string());
            } else {
                self.unexpected.push(id.to_string());
            }
        }
    }
}

fn criterion_1(s: &mut Suite) {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let thresholds = [0.5, 0.8, 0.9, 0.95, 0.975, 1.0];
    let n_corpora = 300;
    let mut mismatches = 0;
    let mut nonempty = 0;
    for i in 0..n_corpora {
        let (corpus, meta) = common::random_small_corpus(&mut rng);
        let t = if i % 4 == 3 { rng.gen_range(0.3..1.0) } else { thresholds[i % thresholds.len()] };
        let got = fit_corpus(&corpus, &meta, t, i as u64, TimeAccounting::Deduplicate).unwrap();
        let got = common::sequence_steps(&got);
        let want = common::oracle_sequence(&corpus, t);
        nonempty += usize::from(!want.is_empty());
        if got != want {
            mismatches += 1;
            eprintln!("corpus {i} (T = {t}): fitted {got:?}, oracle {want:?}");
        }
    }
    let elapsed = start.elapsed();
    s.check(
        "1.oracle-equivalence",
        mismatches == 0,
        format!("{n_corpora} random corpora, {mismatches} mismatches ({nonempty} with non-empty sequences)"),
    );
    s.check("1.runtime", elapsed < Duration::from_secs(10), format!("{:.2?} (limit 10 s)", elapsed));
}

fn criterion_2(s: &mut Suite) {
    let (p, e, meta) = common::toy();
    let trace = |t: f64| common::sequence_steps(&fit_shsr(&p, &e, &meta, t, init_active(&p), 0).unwrap());
    let all: Vec<String> = ["d1", "d2", "d3", "d4"].map(String::from).to_vec();
    let t99 = trace(0.99);
    s.check("2.toy-T0.99", t99 == vec![("C".to_string(), all.clone(), 20.0)], format!("{t99:?}"));
    let t95 = trace(0.95);
    let want95 = vec![("B".to_string(), all.clone(), 80.0), ("A".to_string(), all.clone(), 40.0), ("C".to_string(), all, 20.0)];
    s.check("2.toy-T0.95", t95 == want95, format!("{:?}", t95.iter().map(|x| (&x.0, x.2)).collect::<Vec<_>>()));
    let t101 = trace(1.01);
    s.check("2.toy-T1.01", t101.is_empty(), format!("{} steps", t101.len()));
}

/// Two-pass SSE about the mean.
fn sse(v: &[f64]) -> f64 {
    if v.is_empty() {
        return 0.0;
    }
    let m = v.iter().sum::<f64>() / v.len() as f64;
    v.iter().map(|x| (x - m) * (x - m)).sum()
}

fn criterion_3(s: &mut Suite) {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let n_cases = 3000;
    let mut bad_split = 0;
    let mut bad_alpha = 0;
    for _ in 0..n_cases {
        let n = rng.gen_range(1..=12);
        let grid = rng.gen_range(2..=8);
        let x: Vec<f64> = (0..n).map(|_| f64::from(rng.gen_range(0..grid)) * 0.5).collect();
        let y: Vec<f64> = (0..n)
            .map(|_| if rng.gen_bool(0.3) { f64::from(rng.gen_range(0..3)) } else { rng.gen_range(-5.0..5.0) })
            .collect();
        let rows: Vec<Vec<f64>> = x.iter().map(|&v| vec![v]).collect();
        let tree = grow_tree(&rows, &y, 1).unwrap();

        let mut values: Vec<f64> = x.clone();
        values.sort_by(f64::total_cmp);
        values.dedup();
        let total = sse(&y);
        let candidates: Vec<(f64, f64)> = values
            .windows(2)
            .map(|w| {
                let t = (w[0] + w[1]) / 2.0;
                let left: Vec<f64> = x.iter().zip(&y).filter(|(a, _)| **a < t).map(|p| *p.1).collect();
                let right: Vec<f64> = x.iter().zip(&y).filter(|(a, _)| **a >= t).map(|p| *p.1).collect();
                (t, sse(&left) + sse(&right))
            })
            .collect();
        let tol = 1e-9 * total.max(1.0);
        let best = candidates.iter().map(|c| c.1).fold(f64::INFINITY, f64::min);
        let root = &tree.nodes[tree.root];
        let ok = match &root.split {
            None => candidates.is_empty() || best >= total - tol,
            Some(split) => {
                let chosen = candidates.iter().find(|c| c.0 == split.threshold);
                let first_min = candidates.iter().find(|c| c.1 <= best + tol).map(|c| c.0);
                chosen.is_some_and(|c| c.1 <= best + tol) && first_min == Some(split.threshold)
            }
        };
        if !ok {
            bad_split += 1;
            eprintln!("x = {x:?}, y = {y:?}: split {:?}, candidates {candidates:?}", root.split);
        }
        let path = prune_path(&tree);
        if !path.alphas.windows(2).all(|w| w[0] < w[1]) {
            bad_alpha += 1;
        }
    }
    s.check("3.exhaustive-split", bad_split == 0, format!("{n_cases} one-feature datasets with N <= 12, {bad_split} mismatches"));
    s.check("3.alpha-increasing", bad_alpha == 0, format!("{bad_alpha} pruning paths with non-increasing alphas"));

    let rows = vec![vec![0.0], vec![0.0], vec![1.0], vec![1.0]];
    let tree = grow_tree(&rows, &[1.0, 1.0, 3.0, 3.0], 1).unwrap();
    let path = prune_path(&tree);
    let collapsed = path.subtree_for(4.0);
    let ok = path.alphas == [0.0, 4.0]
        && collapsed.is_leaf_only()
        && collapsed.predict(&[0.0]).unwrap() == 2.0
        && path.subtree_for(4.0 - 1e-12).n_leaves() == 2;
    s.check("3.alpha-4-collapse", ok, format!("alphas {:?}, leaf value at alpha 4: {}", path.alphas, collapsed.predict(&[0.0]).unwrap()));
}

/// Mean silhouette of a fixed labelling, straight from the definition.
fn brute_force_silhouette(points: &[f64], labels: &[usize]) -> f64 {
    let n = points.len();
    let mut total = 0.0;
    for i in 0..n {
        let mean_to = |c: usize| {
            let d: Vec<f64> = (0..n).filter(|&j| j != i && labels[j] == c).map(|j| (points[i] - points[j]).abs()).collect();
            d.iter().sum::<f64>() / d.len() as f64
        };
        let a = mean_to(labels[i]);
        let b = mean_to(1 - labels[i]);
        total += (b - a) / a.max(b);
    }
    total / n as f64
}

fn numeric_ds(cols: Vec<Vec<f64>>, target: Option<Target>) -> TabularDataset<f64> {
    let columns =
        cols.into_iter().enumerate().map(|(i, c)| Column::numerical(format!("x{i}"), c.into_iter().map(Some).collect())).collect();
    TabularDataset::new(columns, target).unwrap()
}

fn criterion_4(s: &mut Suite) {
    let pts = [0.0, 1.0, 100.0, 101.0];
    let rows: Vec<Vec<f64>> = pts.iter().map(|&v| vec![v]).collect();
    let sil = silhouette_of_points(&rows, 2, 0).unwrap();
    s.check("4.silhouette-reference", (sil - 0.99005).abs() <= 1e-6, format!("silhouette {sil:.8} vs reference 0.99005 +/- 1e-6"));
    let oracle = brute_force_silhouette(&pts, &[0, 0, 1, 1]);
    let closed = (99.5 / 100.5 + 98.5 / 99.5) / 2.0;
    s.check(
        "4.silhouette-definition",
        (sil - oracle).abs() <= 1e-12 && (oracle - closed).abs() <= 1e-15,
        format!("silhouette {sil:.10} vs brute force {oracle:.10} = (99.5/100.5 + 98.5/99.5)/2"),
    );

    let base: Vec<f64> = (0..20).map(|i| f64::from(i) * 0.37 - 2.0).collect();
    let rank1 = numeric_ds(
        vec![base.clone(), base.iter().map(|v| 2.0 * v).collect(), base.iter().map(|v| 1.0 - 3.0 * v).collect()],
        None,
    );
    let counts: Vec<Option<usize>> = PCA_PERCENTS.iter().map(|&p| pca_component_count(&rank1, p)).collect();
    s.check("4.pca-rank-1", counts.iter().all(|c| *c == Some(1)), format!("pca counts {counts:?}"));

    let axes = [[1.0, 0.0, 0.0], [-1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, 1.0], [0.0, 0.0, -1.0]];
    let equal = numeric_ds((0..3).map(|j| axes.iter().map(|r| r[j]).collect()).collect(), None);
    let pca60 = pca_component_count(&equal, 60);
    s.check("4.pca-equal-variance", pca60 == Some(2), format!("pca_60 = {pca60:?} for three equal-variance dimensions"));

    let n = 40;
    let ds = TabularDataset::new(
        vec![
            Column::numerical("a", (0..n).map(|i| Some(f64::from(i % 7))).collect()),
            Column::numerical("b", (0..n).map(|i| if i % 9 == 0 { None } else { Some(f64::from(i * i % 11)) }).collect()),
            Column::categorical("c", (0..n).map(|i| Some(["u", "v"][(i % 2) as usize].to_string())).collect()),
        ],
        Some(Target::new("y", TaskKind::Regression, (0..n).map(|i| Some(format!("{}", f64::from(i) * 0.1))).collect())),
    )
    .unwrap();
    let v = extract_all(&ds, 0);
    let fields: Vec<(&str, Option<f64>)> = v.iter().collect();
    let missing: BTreeSet<&str> = fields.iter().filter(|f| f.1.is_none()).map(|f| f.0).collect();
    let want: BTreeSet<&str> = BTreeSet::from([
        "target_majority_class_instances",
        "target_majority_class_f",
        "target_minority_class_instances",
        "target_minority_class_f",
    ]);
    let names_ok = fields.iter().map(|f| f.0).eq(META_FEATURE_NAMES.iter().copied());
    s.check(
        "4.fields-regression",
        fields.len() == N_META_FEATURES && names_ok && missing == want,
        format!("{} fields, missing {:?}", fields.len(), missing),
    );
}

fn criterion_5(s: &mut Suite) {
    let times = [1e-3, 1.0, 37.5, 1e5];
    let accs = [0.0, 0.001, 0.01, 0.1, 1.0, 10.0];
    let exact = times.iter().all(|&t| accs.iter().all(|&a| arr_score(0.9, 0.8, t, t, a).value == 1.125));
    s.check("5.arr-equal-times", exact, "arr_score(0.9, 0.8, t, t, acc_d) == 1.125 for all tried t, acc_d".into());

    let p = 1.0 - 0.995f64.powi(1000);
    s.check("5.probability-reference", (p - 0.99327).abs() <= 1e-5, format!("1 - 0.995^1000 = {p:.10} vs reference 0.99327 +/- 1e-5"));
    let harness = chance_of_keeping_optimal(10_000, 50, 1000);
    s.check(
        "5.probability-closed-form",
        (harness - p).abs() <= 1e-15 && format!("{:.2}", harness * 100.0) == "99.33",
        format!("chance_of_keeping_optimal(10000, 50, 1000) = {harness:.10} (99.33%)"),
    );

    let mut ok = true;
    for k in [1usize, 2, 7, 10, 100, 2983] {
        let ids: Vec<String> = (0..k).map(|i| format!("cfg{i}")).collect();
        for &f in [0.0, 0.3].iter().chain(REMOVAL_SWEEP.iter()) {
            let a = random_elimination(&ids, f, 11).unwrap();
            let b = random_elimination(&ids, f, 11).unwrap();
            let removed = ((f * k as f64) + 1e-9).floor() as usize;
            ok &= a == b && a.len() == k - removed.min(k - 1);
        }
    }
    let ten: Vec<String> = (0..10).map(|i| format!("c{i}")).collect();
    ok &= random_elimination(&ten, 0.3, 5).unwrap().len() == 7;
    s.check("5.random-counts", ok, "kept counts exact and identical across reruns with the same seed".into());
}

fn holdout(seed: u64, repeats: usize) -> HoldoutConfig {
    HoldoutConfig { repeats, test_fraction: 0.1, seed, accounting: TimeAccounting::Deduplicate }
}

fn criterion_6(s: &mut Suite) {
    let start = Instant::now();
    let (corpus, meta) = common::synthetic(6);
    let report = evaluate_holdout(&corpus, &meta, &ShsrPolicy::new(0.999), &holdout(6, 20)).unwrap();
    let elapsed = start.elapsed();
    let perf = report.aggregate.mean_perf_ratio.unwrap_or(0.0);
    let time = report.aggregate.mean_time_ratio;
    s.check("6.time-ratio", time <= 0.6, format!("mean time ratio {time:.4} (<= 0.6)"));
    s.check("6.perf-ratio", perf >= 0.999, format!("mean perf ratio {perf:.6} (>= 0.999)"));
    s.check("6.runtime", elapsed < Duration::from_secs(60), format!("{elapsed:.2?} (limit 60 s)"));
}

/// Keeps the first `keep` share of the configurations in an order fixed by
/// `salt`, so two instances with the same salt are nested.
struct PrefixPolicy {
    salt: u64,
    keep: f64,
}

struct Prefix<'a> {
    space: &'a GroupCatalog,
    salt: u64,
    keep: f64,
}

impl Recommender<f64> for Prefix<'_> {
    fn recommend(&self, dataset_id: &str, _: &MetaFeatureTable<f64>) -> shsr::Result<BTreeSet<String>> {
        let mut ids: Vec<&str> = self.space.configs().collect();
        let key = |c: &str| seed::derive(self.salt, &[seed::hash_str(dataset_id), seed::hash_str(c)]);
        ids.sort_by_key(|c| key(c));
        let n = (self.keep * ids.len() as f64).ceil() as usize;
        Ok(ids[..n].iter().map(|c| c.to_string()).collect())
    }
}

impl Policy<f64> for PrefixPolicy {
    fn name(&self) -> String {
        "prefix".into()
    }

    fn param(&self) -> String {
        format!("salt={};keep={}", self.salt, self.keep)
    }

    fn fit<'a>(
        &'a self,
        _: &'a Corpus<f64>,
        _: &'a MetaFeatureTable<f64>,
        space: &'a GroupCatalog,
        _: u64,
    ) -> shsr::Result<Box<dyn Recommender<f64> + 'a>> {
        Ok(Box::new(Prefix { space, salt: self.salt, keep: self.keep }))
    }
}

fn criterion_7(s: &mut Suite) {
    let (corpus, meta) = common::synthetic(7);
    let report = evaluate_holdout(&corpus, &meta, &IdentityPolicy, &holdout(7, 20)).unwrap();
    let all_one = report
        .repeats
        .iter()
        .flat_map(|r| &r.datasets)
        .all(|d| d.perf_ratio == Some(1.0) && d.time_ratio == 1.0);
    let agg = &report.aggregate;
    let ok = all_one
        && report.repeats.len() == 20
        && agg.mean_perf_ratio == Some(1.0)
        && agg.mean_time_ratio == 1.0
        && agg.perf_ci_half_width == Some(0.0)
        && agg.time_ci_half_width == Some(0.0);
    s.check("7.identity", ok, format!("20 repeats, aggregate {agg:?}"));

    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut violations = 0;
    let n_pairs = 100;
    for pair in 0..n_pairs {
        let a: f64 = rng.gen_range(0.01..1.0);
        let b: f64 = rng.gen_range(0.01..1.0);
        let small = PrefixPolicy { salt: pair, keep: a.min(b) };
        let large = PrefixPolicy { salt: pair, keep: a.max(b) };
        let cfg = holdout(1000 + pair, 2);
        let r1 = evaluate_holdout(&corpus, &meta, &small, &cfg).unwrap();
        let r2 = evaluate_holdout(&corpus, &meta, &large, &cfg).unwrap();
        for (x, y) in r1.repeats.iter().flat_map(|r| &r.datasets).zip(r2.repeats.iter().flat_map(|r| &r.datasets)) {
            let (px, py) = (x.perf_ratio.unwrap_or(0.0), y.perf_ratio.unwrap_or(0.0));
            if x.dataset_id != y.dataset_id || px > py || x.time_ratio > y.time_ratio {
                violations += 1;
            }
        }
    }
    s.check("7.nested-monotonicity", violations == 0, format!("{n_pairs} nested policy pairs, {violations} violations"));

    let policy = ShsrPolicy::new(0.99);
    let first = evaluate_holdout(&corpus, &meta, &policy, &holdout(70, 20)).unwrap().to_json().unwrap();
    let second = evaluate_holdout(&corpus, &meta, &policy, &holdout(70, 20)).unwrap().to_json().unwrap();
    s.check("7.bit-reproducible", first == second, format!("two runs, {} report bytes each, identical: {}", first.len(), first == second));
}

fn criterion_8(s: &mut Suite) {
    let (corpus, meta) = common::synthetic(8);
    let mut rows = Vec::new();
    for &f in &SUBSAMPLE_SWEEP {
        let policy = ShsrPolicy::new(0.999).with_subsample(f);
        let r = evaluate_holdout(&corpus, &meta, &policy, &holdout(8, 20)).unwrap();
        let a = r.aggregate;
        rows.push((f, a.mean_perf_ratio.unwrap_or(0.0), a.mean_time_ratio, a.time_ci_half_width.unwrap_or(0.0)));
        println!("     subsample {f:.1}: perf {:.5}, time {:.5} +/- {:.5}", rows.last().unwrap().1, a.mean_time_ratio, rows.last().unwrap().3);
    }
    let (p20, p100) = (rows[0].1, rows[rows.len() - 1].1);
    s.check("8.perf-at-20pct", (p20 - p100).abs() <= 0.02, format!("perf at 20% {p20:.5}, at 100% {p100:.5}, gap {:.5} (<= 0.02)", (p20 - p100).abs()));
    let mut ok = true;
    for i in 0..rows.len() {
        for j in i + 1..rows.len() {
            ok &= rows[j].2 - rows[j].3 <= rows[i].2 + rows[i].3;
        }
    }
    s.check("8.time-non-increasing", ok, "time ratio at larger fractions never exceeds smaller fractions beyond CI overlap".into());
}

fn main() {
    let mut suite = Suite { unexpected: Vec::new(), known: Vec::new() };
    let criteria: [(&str, Criterion); 8] = [
        ("1 oracle equivalence", criterion_1),
        ("2 toy traces", criterion_2),
        ("3 CART correctness", criterion_3),
        ("4 meta-features", criterion_4),
        ("5 baselines", criterion_5),
        ("6 synthetic end-to-end", criterion_6),
        ("7 protocol invariants", criterion_7),
        ("8 partial results", criterion_8),
    ];
    for (name, run) in criteria {
        println!("== criterion {name}");
        run(&mut suite);
    }
    println!(
        "== summary: {} unexpected failures, {} known-unattainable failures {:?}",
        suite.unexpected.len(),
        suite.known.len(),
        suite.known
    );
    let strict = std::env::var("SHSR_ACCEPTANCE_STRICT").is_ok_and(|v| v == "1");
    if !suite.unexpected.is_empty() || (strict && !suite.known.is_empty()) {
        std::process::exit(1);
    }
}
