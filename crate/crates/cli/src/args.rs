use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use mediarel_core::estimators::Strategy;
use mediarel_core::eval::CorrelationSetting;
use mediarel_core::labels::{ExpsetMode, RewardPolicy};

const LONG_VERSION: &str = concat!(
    env!("CARGO_PKG_VERSION"),
    "\ncommit: ",
    env!("MEDIAREL_GIT_REV"),
    "\ntarget: ",
    env!("MEDIAREL_TARGET"),
    "\nprofile: ",
    env!("MEDIAREL_PROFILE"),
);

/// Reliability estimation for news sources over a hyperlink graph.
#[derive(Debug, Parser)]
#[command(name = "mediarel", version, long_version = LONG_VERSION)]
pub struct Cli {
    /// Worker threads (default: all cores). Output does not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// TOML file with default settings; command-line flags take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    /// Keep links from a source to itself instead of dropping them.
    #[arg(long, global = true)]
    pub keep_self_links: bool,

    /// More log output on stderr (repeatable).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,

    /// Only log errors.
    #[arg(short, long, global = true)]
    pub quiet: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a link-count graph from JSON-lines article records.
    BuildGraph(BuildGraphArgs),
    /// Sum the link counts of several edge lists.
    MergeGraphs(MergeGraphsArgs),
    /// Score every source in the graph.
    Estimate(EstimateArgs),
    /// Cross-validated classification metrics.
    Evaluate(EvaluateArgs),
    /// Cross-validate every value of a hyperparameter grid.
    GridSearch(GridSearchArgs),
    /// Correlate scores with journalist ratings.
    Correlate(CorrelateArgs),
    /// Most and least reliable sources from a score file.
    Rank(RankArgs),
}

#[derive(Debug, Args)]
pub struct BuildGraphArgs {
    /// Article files, one JSON record per line: {"url": ..., "links": [...]}.
    #[arg(required = true)]
    pub articles: Vec<PathBuf>,
    /// Edge list to write (src, dst, count; tab-separated).
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct MergeGraphsArgs {
    #[arg(required = true)]
    pub graphs: Vec<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EstimatorArgs {
    /// f, p, fp, i, avg-p-fp or pagerank [default: p]
    #[arg(long)]
    pub strategy: Option<Strategy>,
    /// Discount factor in [0, 1) [default: tuned per strategy and expset]
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Discount of the FP half of avg-p-fp [default: tuned FP value]
    #[arg(long)]
    pub gamma_fp: Option<f64>,
    /// Investment rounds for i [default: tuned per expset]
    #[arg(long)]
    pub n: Option<usize>,
    /// Convergence threshold on the largest per-sweep change [default: 1e-8]
    #[arg(long)]
    pub tol: Option<f64>,
    /// Iteration cap [default: 10000]
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// PageRank damping [default: 0.85]
    #[arg(long)]
    pub damping: Option<f64>,
    /// Experiment set, used for label handling and tuned defaults: a, b or b-minus [default: b]
    #[arg(long)]
    pub expset: Option<ExpsetMode>,
}

#[derive(Debug, Args)]
pub struct FoldArgs {
    /// Number of folds [default: 5]
    #[arg(long)]
    pub k: Option<usize>,
    /// Fold shuffling seed [default: 0]
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    #[arg(long)]
    pub graph: PathBuf,
    /// Label CSV (domain,label[,origin]); not needed for pagerank.
    #[arg(long)]
    pub labels: Option<PathBuf>,
    #[command(flatten)]
    pub estimator: EstimatorArgs,
    /// How mixed labels become rewards [default: strict for b-minus, merged otherwise]
    #[arg(long)]
    pub reward_policy: Option<RewardPolicy>,
    /// Score file to write (domain, rho, rho_normalized); stdout if absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub labels: PathBuf,
    #[command(flatten)]
    pub estimator: EstimatorArgs,
    #[command(flatten)]
    pub folds: FoldArgs,
    /// External predictions (domain,prediction) combined by agreement vote.
    #[arg(long)]
    pub ensemble: Option<PathBuf>,
    /// Report file; stdout if absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GridSearchArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub labels: PathBuf,
    #[command(flatten)]
    pub estimator: EstimatorArgs,
    #[command(flatten)]
    pub folds: FoldArgs,
    /// `default` or a comma-separated list of values.
    #[arg(long, default_value = "default")]
    pub grid: String,
    /// Per-point CSV (value, mean, std, ci).
    #[arg(long)]
    pub sweep: Option<PathBuf>,
    /// Result file; stdout if absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CorrelateArgs {
    #[arg(long)]
    pub graph: PathBuf,
    #[arg(long)]
    pub labels: PathBuf,
    /// Journalist scores (domain,score) in [0, 100].
    #[arg(long)]
    pub scores: PathBuf,
    #[command(flatten)]
    pub estimator: EstimatorArgs,
    /// with: all rewards; without: rewards of scored domains removed.
    #[arg(long, default_value = "with")]
    pub setting: CorrelationSetting,
    #[arg(long)]
    pub reward_policy: Option<RewardPolicy>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RankArgs {
    /// Score file written by `estimate`.
    #[arg(long)]
    pub scores: PathBuf,
    #[arg(long, default_value_t = 5)]
    pub top: usize,
    #[arg(long, default_value_t = 5)]
    pub bottom: usize,
}
