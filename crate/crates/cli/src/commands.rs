use std::collections::BTreeSet;
use std::path::Path;

use serde::Serialize;
use shsr::baselines::{knn_recommend, random_elimination, ArrParams, KnnArrPolicy, RandomEliminationPolicy};
use shsr::data::{load_run_records, Corpus, GroupCatalog, TimeAccounting};
use shsr::evaluation::{
    evaluate_holdout, write_plot_csv, write_tidy_csv, EvaluationReport, HoldoutConfig, IdentityPolicy, Policy,
    ShsrPolicy,
};
use shsr::metafeatures::{extract_all, CsvOptions, MetaFeatureTable, TabularDataset, TaskKind};
use shsr::reduction::{apply_filter, fit_corpus, surviving_configurations, FilterSequence};
use shsr::seed;

use crate::args::{ApplyArgs, EvaluateArgs, ExtractMetaArgs, FitArgs, KnnArgs, PolicyKind, RandomArgs, Task};
use crate::output::{Inputs, Outputs, RunManifest};
use crate::CliError;

const VERSION: &str = env!("CARGO_PKG_VERSION");

fn accounting(no_dedup: bool) -> TimeAccounting {
    if no_dedup {
        TimeAccounting::Naive
    } else {
        TimeAccounting::Deduplicate
    }
}

fn json_bytes<V: Serialize>(value: &V) -> Result<Vec<u8>, CliError> {
    let mut bytes = serde_json::to_vec_pretty(value).map_err(|e| CliError::Validation(e.to_string()))?;
    bytes.push(b'\n');
    Ok(bytes)
}

fn load_corpus(inputs: &mut Inputs, path: &Path) -> Result<Corpus<f64>, CliError> {
    let bytes = inputs.read(path)?;
    let records = load_run_records(bytes.as_slice()).map_err(|e| CliError::context(path, e))?;
    Corpus::new(records).map_err(|e| CliError::context(path, e))
}

fn load_meta(inputs: &mut Inputs, path: &Path) -> Result<MetaFeatureTable<f64>, CliError> {
    let bytes = inputs.read(path)?;
    MetaFeatureTable::read_csv(bytes.as_slice()).map_err(|e| CliError::context(path, e))
}

fn manifest<'a, P: Serialize>(command: &'a str, params: &'a P, inputs: &'a Inputs, seed: Option<u64>) -> RunManifest<'a, P> {
    RunManifest { command, params, inputs: &inputs.digests, seed, version: VERSION }
}

pub fn extract_meta(args: &ExtractMetaArgs) -> Result<(), CliError> {
    let mut inputs = Inputs::default();
    let options = CsvOptions {
        target: args.target.clone(),
        task: match args.task {
            Task::Classification => TaskKind::BinaryClassification,
            Task::Regression => TaskKind::Regression,
        },
        categorical: args.categorical.clone(),
    };
    let mut table = MetaFeatureTable::<f64>::standard();
    for path in &args.data {
        let id = path
            .file_stem()
            .and_then(|s| s.to_str())
            .ok_or_else(|| CliError::Validation(format!("cannot derive a dataset id from {}", path.display())))?
            .to_string();
        let bytes = inputs.read(path)?;
        let ds = TabularDataset::from_csv(bytes.as_slice(), &options).map_err(|e| CliError::context(path, e))?;
        let values = extract_all(&ds, seed::derive(args.seed, &[seed::hash_str(&id)]));
        table.insert_vector(id, &values).map_err(|e| CliError::context(path, e))?;
    }
    let mut csv = Vec::new();
    table.write_csv(&mut csv)?;
    let mut out = Outputs::default();
    out.add_with_manifest(&args.out, csv, &manifest("extract-meta", args, &inputs, Some(args.seed)))?;
    out.write_all()
}

pub fn fit(args: &FitArgs) -> Result<(), CliError> {
    let mut inputs = Inputs::default();
    let corpus = load_corpus(&mut inputs, &args.runs)?;
    let meta = load_meta(&mut inputs, &args.meta)?;
    if args.threshold > 1.0 {
        eprintln!("warning: threshold > 1 yields empty filter");
    }
    let seq = fit_corpus(&corpus, &meta, args.threshold, args.seed, accounting(args.no_dedup))?;
    for step in &seq.steps {
        log::info!("step {}: saves {} s on {} datasets", step.group_id, step.time_saved_at_fit, step.covered_at_fit.len());
    }
    let mut out = Outputs::default();
    out.add_with_manifest(&args.out, seq.to_json()?.into_bytes(), &manifest("fit", args, &inputs, Some(args.seed)))?;
    out.write_all()
}

#[derive(Debug, Serialize)]
struct Applied {
    dataset_id: String,
    dropped: Vec<String>,
    kept: Vec<String>,
    safeguard_triggered: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    kept_configs: Option<BTreeSet<String>>,
}

pub fn apply(args: &ApplyArgs) -> Result<(), CliError> {
    let mut inputs = Inputs::default();
    let model_bytes = inputs.read(&args.model)?;
    let seq = FilterSequence::<f64>::read_json(model_bytes.as_slice()).map_err(|e| CliError::context(&args.model, e))?;
    let meta = load_meta(&mut inputs, &args.meta)?;
    let catalog = match &args.runs {
        Some(path) => {
            let bytes = inputs.read(path)?;
            let records = load_run_records::<f64, _>(bytes.as_slice()).map_err(|e| CliError::context(path, e))?;
            Some(GroupCatalog::from_records(&records).map_err(|e| CliError::context(path, e))?)
        }
        None => None,
    };
    let mut results = Vec::new();
    for id in meta.dataset_ids() {
        let row = meta.aligned_row(id, &seq.feature_names).expect("id comes from the table");
        let outcome = apply_filter(&seq, &row)?;
        results.push(Applied {
            dataset_id: id.to_string(),
            kept_configs: catalog.as_ref().map(|c| surviving_configurations(&outcome.dropped, c)),
            dropped: outcome.dropped,
            kept: outcome.kept,
            safeguard_triggered: outcome.safeguard_triggered,
        });
    }
    for r in &results {
        let mut line = format!("{}: kept {{{}}} dropped {{{}}}", r.dataset_id, r.kept.join(","), r.dropped.join(","));
        if let Some(k) = &r.kept_configs {
            line.push_str(&format!(" configurations {}", k.len()));
        }
        if r.safeguard_triggered {
            line.push_str(" (safeguard)");
        }
        println!("{line}");
    }
    if let Some(path) = &args.out {
        let mut out = Outputs::default();
        out.add_with_manifest(path, json_bytes(&results)?, &manifest("apply", args, &inputs, None))?;
        out.write_all()?;
    }
    Ok(())
}

fn policies(args: &EvaluateArgs) -> Result<Vec<Box<dyn Policy<f64>>>, CliError> {
    let acc = accounting(args.no_dedup);
    let mut out: Vec<Box<dyn Policy<f64>>> = Vec::new();
    match args.policy {
        PolicyKind::Identity => out.push(Box::new(IdentityPolicy)),
        PolicyKind::Shsr => {
            for &t in &args.threshold {
                if !(t.is_finite() && t > 0.0) {
                    return Err(CliError::Validation(format!("threshold must be finite and > 0, got {t}")));
                }
                if args.subsample.is_empty() {
                    out.push(Box::new(ShsrPolicy { threshold: t, subsample: None, accounting: acc }));
                }
                for &f in &args.subsample {
                    if !(f > 0.0 && f <= 1.0) {
                        return Err(CliError::Validation(format!("subsample fraction must lie in (0, 1], got {f}")));
                    }
                    out.push(Box::new(ShsrPolicy { threshold: t, subsample: Some(f), accounting: acc }));
                }
            }
        }
        PolicyKind::Random => {
            for &f in &args.frac {
                if !(0.0..1.0).contains(&f) {
                    return Err(CliError::Validation(format!("removal fraction must lie in [0, 1), got {f}")));
                }
                out.push(Box::new(RandomEliminationPolicy { fraction: f }));
            }
        }
        PolicyKind::Knn => {
            for &n in &args.neighbors {
                for &a in &args.accd {
                    for &m in &args.top_m {
                        let params = ArrParams { n_neighbors: n, acc_d: a, top_m: m };
                        params.validate()?;
                        out.push(Box::new(KnnArrPolicy { params }));
                    }
                }
            }
        }
    }
    Ok(out)
}

pub fn evaluate(args: &EvaluateArgs) -> Result<(), CliError> {
    let policies = policies(args)?;
    let mut inputs = Inputs::default();
    let corpus = load_corpus(&mut inputs, &args.runs)?;
    let meta = load_meta(&mut inputs, &args.meta)?;
    let config = HoldoutConfig {
        repeats: args.repeats,
        test_fraction: args.test_frac,
        seed: args.seed,
        accounting: accounting(args.no_dedup),
    };
    let mut reports: Vec<EvaluationReport<f64>> = Vec::new();
    for p in &policies {
        let report = evaluate_holdout(&corpus, &meta, p.as_ref(), &config)?;
        let a = &report.aggregate;
        println!(
            "{}{}: perf {} time {:.6}{}",
            report.policy,
            if report.param.is_empty() { String::new() } else { format!(" {}", report.param) },
            a.mean_perf_ratio.map_or("n/a".to_string(), |v| format!("{v:.6}")),
            a.mean_time_ratio,
            if report.flagged > 0 { format!(" ({} held-out datasets kept nothing)", report.flagged) } else { String::new() }
        );
        reports.push(report);
    }
    let m = manifest("evaluate", args, &inputs, Some(args.seed));
    let mut out = Outputs::default();
    out.add_with_manifest(&args.out, json_bytes(&reports)?, &m)?;
    if let Some(path) = &args.tidy {
        let mut buf = Vec::new();
        write_tidy_csv(&reports, &mut buf)?;
        out.add_with_manifest(path, buf, &m)?;
    }
    if let Some(path) = &args.plot {
        let mut buf = Vec::new();
        write_plot_csv(&reports, &mut buf)?;
        out.add_with_manifest(path, buf, &m)?;
    }
    out.write_all()
}

#[derive(Debug, Serialize)]
struct RandomOutput {
    n_configs: usize,
    kept: BTreeSet<String>,
}

pub fn baseline_random(args: &RandomArgs) -> Result<(), CliError> {
    let mut inputs = Inputs::default();
    let corpus = load_corpus(&mut inputs, &args.runs)?;
    let configs: Vec<&str> = corpus.catalog().configs().collect();
    let kept = random_elimination(&configs, args.frac, args.seed)?;
    println!("kept {} of {} configurations", kept.len(), configs.len());
    let mut out = Outputs::default();
    let result = RandomOutput { n_configs: configs.len(), kept };
    out.add_with_manifest(&args.out, json_bytes(&result)?, &manifest("baseline random", args, &inputs, Some(args.seed)))?;
    out.write_all()
}

#[derive(Debug, Serialize)]
struct KnnOutput<'a> {
    query: &'a str,
    ranked: Vec<String>,
}

pub fn baseline_knn(args: &KnnArgs) -> Result<(), CliError> {
    let mut inputs = Inputs::default();
    let corpus = load_corpus(&mut inputs, &args.runs)?;
    let meta = load_meta(&mut inputs, &args.meta)?;
    let query = meta.row(&args.query).ok_or_else(|| shsr::Error::MissingMetaFeatures(args.query.clone()))?.to_vec();
    let train_ids: BTreeSet<&str> = corpus.dataset_ids().filter(|d| *d != args.query).collect();
    let train = corpus.restrict(&train_ids);
    let params = ArrParams { n_neighbors: args.neighbors, acc_d: args.accd, top_m: args.top_m };
    let ranked = knn_recommend(&train, &meta, &query, &params)?;
    for c in &ranked {
        println!("{c}");
    }
    let mut out = Outputs::default();
    let result = KnnOutput { query: &args.query, ranked };
    out.add_with_manifest(&args.out, json_bytes(&result)?, &manifest("baseline knn", args, &inputs, None))?;
    out.write_all()
}
