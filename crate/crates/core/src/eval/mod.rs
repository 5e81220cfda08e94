//! Evaluation protocol: cross-validated sign classification, hyperparameter
//! sweeps, rank correlation against journalist scores, significance tests
//! and simple ensembles.

mod correlate;
mod cv;
mod ensemble;
mod folds;
mod grid;
mod metrics;
pub mod stats;

use thiserror::Error;

use crate::estimators::EstimateError;
use crate::graph::SourceId;

pub use correlate::{correlate, CorrelationResult, CorrelationSetting};
pub use cv::{cross_validate, CvOptions, EvalReport, FoldContext, FoldPrediction, FoldResult};
pub use ensemble::{average_strategies, ensemble_vote, load_predictions};
pub use folds::{kfold_split, Fold};
pub use grid::{grid_search, GridPoint, GridSearchResult, Hyperparameter};
pub use metrics::{metrics, ClassMetrics, ConfusionMetrics};
pub use stats::{paired_ttest, pearson, spearman, CorrelationTest, TTest};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("k must be at least 2, got {0}")]
    InvalidK(usize),
    #[error("class {class} has {members} members, fewer than k = {k}")]
    ClassTooSmall { class: String, members: usize, k: usize },
    #[error("prediction and gold key sets differ ({0} mismatched domains)")]
    KeyMismatch(usize),
    #[error("labeled domains missing from the graph: {}", list(.0))]
    NotInGraph(Vec<SourceId>),
    #[error("fold {fold}: {source}")]
    Fold { fold: usize, source: EstimateError },
    #[error(transparent)]
    Estimate(#[from] EstimateError),
    #[error("no ensemble prediction for {0}")]
    MissingEnsemblePrediction(SourceId),
    #[error("empty hyperparameter grid")]
    EmptyGrid,
    #[error("invalid grid value {0} for {1}")]
    InvalidGridValue(f64, &'static str),
    #[error("no scored domain is present in the graph")]
    NoScoredDomains,
    #[error("samples differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("correlation undefined for constant input")]
    ConstantInput,
    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

fn list(ids: &[SourceId]) -> String {
    const SHOWN: usize = 10;
    let mut s = ids
        .iter()
        .take(SHOWN)
        .map(SourceId::as_str)
        .collect::<Vec<_>>()
        .join(", ");
    if ids.len() > SHOWN {
        s.push_str(&format!(" and {} more", ids.len() - SHOWN));
    }
    s
}
