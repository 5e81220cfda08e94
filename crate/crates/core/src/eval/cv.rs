use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::metrics::ConfusionMetrics;
use super::{kfold_split, EvalError};
use crate::estimators::{EstimatorConfig, Prediction, ReliabilityEstimator, Strategy};
use crate::graph::{SourceGraph, SourceId};
use crate::labels::{reward_for, LabeledDataset, ReliabilityLabel, RewardAssignment, RewardPolicy};

/// What an estimator is handed for one fold, exposed for auditing.
pub struct FoldContext<'a> {
    pub fold: usize,
    pub graph: &'a SourceGraph,
    pub test: &'a [SourceId],
    /// Exactly the reward vector passed to the estimator.
    pub rewards: &'a [f64],
}

#[derive(Default, Clone, Copy)]
pub struct CvOptions<'a> {
    /// External per-domain predictions; a test domain is reliable only when
    /// both the estimator and this map say so.
    pub ensemble: Option<&'a BTreeMap<SourceId, Prediction>>,
    pub inspect: Option<&'a (dyn Fn(&FoldContext<'_>) + Sync)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldPrediction {
    pub domain: SourceId,
    pub rho: f64,
    pub predicted: Prediction,
    pub gold: Prediction,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldResult {
    pub fold: usize,
    pub train_size: usize,
    pub test_size: usize,
    /// Test-fold domains that carried a non-zero reward during estimation.
    pub test_rewards_nonzero: usize,
    pub iterations: usize,
    pub metrics: ConfusionMetrics,
    pub predictions: Vec<FoldPrediction>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub dataset: String,
    pub strategy: Strategy,
    pub config: EstimatorConfig,
    pub k: usize,
    pub seed: u64,
    pub ensemble: bool,
    pub folds: Vec<FoldResult>,
    pub mean: ConfusionMetrics,
    /// Sample standard deviation across folds.
    pub std: ConfusionMetrics,
    /// Normal-approximation 95% half-width, `1.96 · std / √k`.
    pub ci95: ConfusionMetrics,
}

impl EvalReport {
    pub fn mean_macro_f1(&self) -> f64 {
        self.mean.macro_avg.f1
    }
}

pub(crate) fn gold_prediction(label: ReliabilityLabel) -> Prediction {
    match label {
        ReliabilityLabel::Reliable => Prediction::Reliable,
        ReliabilityLabel::Mixed | ReliabilityLabel::Unreliable => Prediction::Unreliable,
    }
}

/// Mean, sample std and 95% half-width of each metric across folds.
pub(crate) fn summarize(folds: &[ConfusionMetrics]) -> (ConfusionMetrics, ConfusionMetrics, ConfusionMetrics) {
    let k = folds.len() as f64;
    let mut mean = [0.0; ConfusionMetrics::LEN];
    let mut std = [0.0; ConfusionMetrics::LEN];
    let mut ci = [0.0; ConfusionMetrics::LEN];
    for i in 0..ConfusionMetrics::LEN {
        let values: Vec<f64> = folds.iter().map(|m| m.to_array()[i]).collect();
        let (m, s) = mean_std(&values);
        mean[i] = m;
        std[i] = s;
        ci[i] = 1.96 * s / k.sqrt();
    }
    (
        ConfusionMetrics::from_array(mean),
        ConfusionMetrics::from_array(std),
        ConfusionMetrics::from_array(ci),
    )
}

pub(crate) fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    if values.is_empty() {
        return (0.0, 0.0);
    }
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// k-fold evaluation: each fold's estimate sees rewards for the training
/// domains only and is scored by sign on the held-out domains.
pub fn cross_validate(
    estimator: &dyn ReliabilityEstimator,
    graph: &SourceGraph,
    dataset: &LabeledDataset,
    k: usize,
    seed: u64,
    options: CvOptions<'_>,
) -> Result<EvalReport, EvalError> {
    estimator.config().validate()?;
    let missing: Vec<SourceId> = dataset
        .entries
        .keys()
        .filter(|id| !graph.contains(id))
        .cloned()
        .collect();
    if !missing.is_empty() {
        return Err(EvalError::NotInGraph(missing));
    }
    let folds = kfold_split(dataset, k, seed)?;

    let results: Vec<FoldResult> = folds
        .par_iter()
        .enumerate()
        .map(|(index, fold)| {
            let train_rewards: RewardAssignment = fold
                .train
                .iter()
                .map(|id| (id.clone(), reward_for(dataset.entries[id].label, RewardPolicy::Merged)))
                .collect();
            let rewards = train_rewards.vector_for(graph);
            let test_rewards_nonzero = fold
                .test
                .iter()
                .filter(|id| graph.position(id).is_some_and(|i| rewards[i] != 0.0))
                .count();
            if let Some(inspect) = options.inspect {
                inspect(&FoldContext {
                    fold: index,
                    graph,
                    test: &fold.test,
                    rewards: &rewards,
                });
            }
            let scores = estimator
                .estimate(graph, &rewards)
                .map_err(|source| EvalError::Fold { fold: index, source })?;

            let mut predictions = Vec::with_capacity(fold.test.len());
            for id in &fold.test {
                let rho = scores.rho(id);
                let mut predicted = Prediction::from_score(rho);
                if let Some(external) = options.ensemble {
                    let other = *external
                        .get(id)
                        .ok_or_else(|| EvalError::MissingEnsemblePrediction(id.clone()))?;
                    if other == Prediction::Unreliable {
                        predicted = Prediction::Unreliable;
                    }
                }
                predictions.push(FoldPrediction {
                    domain: id.clone(),
                    rho,
                    predicted,
                    gold: gold_prediction(dataset.entries[id].label),
                });
            }
            let metrics = ConfusionMetrics::from_pairs(predictions.iter().map(|p| (p.gold, p.predicted)));
            Ok(FoldResult {
                fold: index,
                train_size: fold.train.len(),
                test_size: fold.test.len(),
                test_rewards_nonzero,
                iterations: scores.provenance.iterations,
                metrics,
                predictions,
            })
        })
        .collect::<Result<_, EvalError>>()?;

    let per_fold: Vec<ConfusionMetrics> = results.iter().map(|f| f.metrics).collect();
    let (mean, std, ci95) = summarize(&per_fold);
    Ok(EvalReport {
        dataset: dataset.name.clone(),
        strategy: estimator.strategy(),
        config: estimator.config(),
        k,
        seed,
        ensemble: options.ensemble.is_some(),
        folds: results,
        mean,
        std,
        ci95,
    })
}
