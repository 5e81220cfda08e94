use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use log::{info, warn};
use mediarel_core::estimators::{Estimator, ReliabilityEstimator, Strategy};
use mediarel_core::eval::{correlate, cross_validate, grid_search, load_predictions, CvOptions, Hyperparameter};
use mediarel_core::graph::SourceGraph;
use mediarel_core::ingest::{GraphBuilder, IngestConfig};
use mediarel_core::labels::{build_expset, load_labels, load_scores, to_rewards, LabeledDataset, RewardAssignment};
use serde::Serialize;

use crate::args::*;
use crate::error::CliError;
use crate::settings::Settings;

fn open(path: &Path) -> Result<File, CliError> {
    File::open(path).map_err(|e| CliError::io(path, e))
}

fn load_graph(path: &Path, settings: &Settings) -> Result<SourceGraph, CliError> {
    let graph = SourceGraph::load_edges(BufReader::new(open(path)?), settings.self_links())
        .map_err(|e| CliError::from(e).at(path))?;
    info!(
        "{}: {} sources, {} links",
        path.display(),
        graph.node_count(),
        graph.edge_count()
    );
    Ok(graph)
}

fn load_dataset(path: &Path) -> Result<LabeledDataset, CliError> {
    let name = path
        .file_stem()
        .map_or("labels".into(), |s| s.to_string_lossy().into_owned());
    let ds = load_labels(open(path)?, &name).map_err(|e| CliError::from(e).at(path))?;
    let c = ds.class_counts();
    info!(
        "{}: {} reliable, {} mixed, {} unreliable",
        path.display(),
        c.reliable,
        c.mixed,
        c.unreliable
    );
    Ok(ds)
}

fn guard_inputs(out: Option<&Path>, inputs: &[&Path]) -> Result<(), CliError> {
    if let Some(out) = out {
        if inputs.contains(&out) {
            return Err(CliError::config("output path would overwrite an input").at(out));
        }
    }
    Ok(())
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, bytes).map_err(|e| CliError::io(path, e)),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(bytes)
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::new("io", e.to_string()))
        }
    }
}

fn emit_json<T: Serialize>(out: Option<&Path>, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).expect("report serializes");
    text.push('\n');
    emit(out, text.as_bytes())
}

fn rewards_for(
    labels: &Path,
    graph: &SourceGraph,
    settings: &Settings,
    policy: Option<mediarel_core::labels::RewardPolicy>,
    args: &EstimatorArgs,
) -> Result<RewardAssignment, CliError> {
    let dataset = load_dataset(labels)?;
    let policy = settings.reward_policy(policy, settings.expset(args));
    let rewards = to_rewards(&dataset, policy);
    let outside = dataset.entries.keys().filter(|id| !graph.contains(id)).count();
    if outside > 0 {
        info!("{outside} labeled domains are not in the graph and carry no reward");
    }
    Ok(rewards)
}

pub fn build_graph(args: &BuildGraphArgs, settings: &Settings) -> Result<(), CliError> {
    let inputs: Vec<&Path> = args.articles.iter().map(PathBuf::as_path).collect();
    guard_inputs(Some(&args.out), &inputs)?;
    let mut builder = GraphBuilder::new(IngestConfig {
        self_links: settings.self_links(),
    });
    for path in &args.articles {
        builder
            .read_jsonl(BufReader::new(open(path)?))
            .map_err(|e| CliError::from(e).at(path))?;
    }
    let (graph, stats) = builder.finish();
    let mut buf = Vec::new();
    graph.save_edges(&mut buf).map_err(|e| CliError::io(&args.out, e))?;
    emit(Some(&args.out), &buf)?;
    emit_json(None, &stats)
}

pub fn merge_graphs(args: &MergeGraphsArgs, settings: &Settings) -> Result<(), CliError> {
    let inputs: Vec<&Path> = args.graphs.iter().map(PathBuf::as_path).collect();
    guard_inputs(Some(&args.out), &inputs)?;
    let graphs = inputs
        .iter()
        .map(|p| load_graph(p, settings))
        .collect::<Result<Vec<_>, _>>()?;
    let merged = SourceGraph::merge(&graphs)?;
    let mut buf = Vec::new();
    merged.save_edges(&mut buf).map_err(|e| CliError::io(&args.out, e))?;
    emit(Some(&args.out), &buf)
}

pub fn estimate(args: &EstimateArgs, settings: &Settings) -> Result<(), CliError> {
    let est = settings.estimator(&args.estimator)?;
    let mut inputs = vec![args.graph.as_path()];
    inputs.extend(args.labels.as_deref());
    guard_inputs(args.out.as_deref(), &inputs)?;
    let graph = load_graph(&args.graph, settings)?;
    let rewards = match (&args.labels, est.strategy) {
        (_, Strategy::PageRank) => vec![0.0; graph.node_count()],
        (Some(labels), _) => {
            rewards_for(labels, &graph, settings, args.reward_policy, &args.estimator)?.vector_for(&graph)
        }
        (None, s) => return Err(CliError::config(format!("strategy {s} needs --labels"))),
    };
    let scores = est.estimate(&graph, &rewards)?;
    info!(
        "{}: {} iterations, final change {:e}",
        est.strategy, scores.provenance.iterations, scores.provenance.residual
    );
    let mut buf = Vec::new();
    scores
        .write_tsv(&mut buf)
        .map_err(|e| CliError::new("io", e.to_string()))?;
    emit(args.out.as_deref(), &buf)?;
    if args.out.is_some() {
        emit_json(None, &scores.provenance)?;
    }
    Ok(())
}

fn expset(
    labels: &Path,
    graph: &SourceGraph,
    settings: &Settings,
    args: &EstimatorArgs,
) -> Result<LabeledDataset, CliError> {
    let dataset = load_dataset(labels)?;
    let (ds, summary) =
        build_expset(&dataset, graph, settings.expset(args)).map_err(|e| CliError::from(e).at(labels))?;
    info!(
        "expset {}: {} reliable, {} unreliable ({} mixed relabeled, {} mixed dropped, {} outside graph)",
        summary.mode,
        summary.reliable,
        summary.unreliable,
        summary.mixed_relabeled,
        summary.mixed_dropped,
        summary.outside_graph
    );
    Ok(ds)
}

pub fn evaluate(args: &EvaluateArgs, settings: &Settings) -> Result<(), CliError> {
    let est = settings.estimator(&args.estimator)?;
    let (k, seed) = settings.folds(&args.folds)?;
    let mut inputs = vec![args.graph.as_path(), args.labels.as_path()];
    inputs.extend(args.ensemble.as_deref());
    guard_inputs(args.out.as_deref(), &inputs)?;
    let graph = load_graph(&args.graph, settings)?;
    let ds = expset(&args.labels, &graph, settings, &args.estimator)?;
    let ensemble = match &args.ensemble {
        Some(path) => Some(load_predictions(open(path)?).map_err(|e| CliError::from(e).at(path))?),
        None => None,
    };
    let options = CvOptions {
        ensemble: ensemble.as_ref(),
        ..Default::default()
    };
    let report = cross_validate(&est, &graph, &ds, k, seed, options)?;
    info!("{}: mean macro-F1 {:.2}", est.strategy, report.mean.macro_avg.f1);
    emit_json(args.out.as_deref(), &report)
}

fn parse_grid(spec: &str, parameter: Hyperparameter) -> Result<Vec<f64>, CliError> {
    if spec == "default" {
        return Ok(parameter.default_grid());
    }
    spec.split(',')
        .map(|v| {
            v.trim()
                .parse::<f64>()
                .map_err(|_| CliError::config(format!("grid value {v:?} is not a number")))
        })
        .collect()
}

pub fn grid(args: &GridSearchArgs, settings: &Settings) -> Result<(), CliError> {
    let est: Estimator = settings.estimator(&args.estimator)?;
    if est.strategy == Strategy::PageRank {
        return Err(CliError::config("pagerank has no hyperparameter to search"));
    }
    let parameter = Hyperparameter::for_strategy(est.strategy);
    let values = parse_grid(&args.grid, parameter)?;
    let (k, seed) = settings.folds(&args.folds)?;
    let inputs = [args.graph.as_path(), args.labels.as_path()];
    guard_inputs(args.out.as_deref(), &inputs)?;
    guard_inputs(args.sweep.as_deref(), &inputs)?;
    let graph = load_graph(&args.graph, settings)?;
    let ds = expset(&args.labels, &graph, settings, &args.estimator)?;
    let result = grid_search(&est, parameter, &values, &graph, &ds, k, seed)?;
    info!(
        "selected {} = {} (mean macro-F1 {:.2})",
        parameter, result.selected, result.selected_macro_f1
    );
    if let Some(path) = &args.sweep {
        let mut buf = Vec::new();
        result.write_sweep_csv(&mut buf).map_err(|e| CliError::io(path, e))?;
        emit(Some(path), &buf)?;
    }
    emit_json(args.out.as_deref(), &result)
}

pub fn correlate_scores(args: &CorrelateArgs, settings: &Settings) -> Result<(), CliError> {
    let est = settings.estimator(&args.estimator)?;
    guard_inputs(args.out.as_deref(), &[&args.graph, &args.labels, &args.scores])?;
    let graph = load_graph(&args.graph, settings)?;
    let rewards = rewards_for(&args.labels, &graph, settings, args.reward_policy, &args.estimator)?;
    let table = load_scores(open(&args.scores)?).map_err(|e| CliError::from(e).at(&args.scores))?;
    let result = correlate(&est, &graph, &rewards, &table, args.setting)?;
    emit_json(args.out.as_deref(), &result)
}

struct Ranked {
    domain: String,
    rho: f64,
    normalized: f64,
}

fn read_score_file(path: &Path) -> Result<Vec<Ranked>, CliError> {
    let mut rows = Vec::new();
    for (i, line) in BufReader::new(open(path)?).lines().enumerate() {
        let line = line.map_err(|e| CliError::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let bad = |msg: String| CliError {
            line: Some(i as u64 + 1),
            ..CliError::new("parse", msg).at(path)
        };
        let fields: Vec<&str> = line.split('\t').collect();
        let [domain, rho, normalized] = fields[..] else {
            return Err(bad(format!("expected 3 tab-separated fields, found {}", fields.len())));
        };
        let num = |s: &str| s.parse::<f64>().map_err(|_| bad(format!("{s:?} is not a number")));
        rows.push(Ranked {
            domain: domain.to_string(),
            rho: num(rho)?,
            normalized: num(normalized)?,
        });
    }
    rows.sort_by(|a, b| b.rho.total_cmp(&a.rho).then_with(|| a.domain.cmp(&b.domain)));
    Ok(rows)
}

pub fn rank(args: &RankArgs) -> Result<(), CliError> {
    let rows = read_score_file(&args.scores)?;
    let top = args.top.min(rows.len());
    let bottom = args.bottom.min(rows.len() - top);
    if top + bottom < args.top + args.bottom {
        warn!("only {} scored sources; lists are shorter than requested", rows.len());
    }
    let best = &rows[..top];
    let worst: Vec<&Ranked> = rows[rows.len() - bottom..].iter().rev().collect();

    let width = rows.iter().map(|r| r.domain.len()).max().unwrap_or(0).max(14);
    let mut out = String::new();
    out.push_str(&format!(
        "{:<4}  {:<width$}  {:>8}  {:<width$}  {:>8}\n",
        "rank", "most reliable", "rho", "least reliable", "rho"
    ));
    for i in 0..top.max(bottom) {
        fn cell(r: Option<&Ranked>) -> (&str, String) {
            match r {
                Some(r) => (r.domain.as_str(), format!("{:.4}", r.normalized)),
                None => ("", String::new()),
            }
        }
        let (a, ar) = cell(best.get(i));
        let (b, br) = cell(worst.get(i).copied());
        let line = format!("{:<4}  {a:<width$}  {ar:>8}  {b:<width$}  {br:>8}", i + 1);
        out.push_str(line.trim_end());
        out.push('\n');
    }
    emit(None, out.as_bytes())
}
