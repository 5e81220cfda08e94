//! Reliability degree estimators.
//!
//! All estimators take a normalized [`SourceGraph`] and a dense reward vector
//! aligned with `graph.nodes()` (see [`RewardAssignment::vector_for`]) and
//! return a score for every node.
//!
//! | strategy | update |
//! |---|---|
//! | F  | `ρ'(s) = Σ_t w(s,t) [r(t) + γ ρ(t)]` from `ρ = 0` |
//! | P  | `ρ'(s) = r(s) + γ Σ_t w(t,s) ρ(t)` from `ρ = 0` |
//! | FP | F on `min(r, 0)` plus P on `max(r, 0)` |
//! | I  | `n` invest/collect rounds from `ρ = r` |
//!
//! F and P sweep the whole vector synchronously until the largest change
//! drops below `tol`.
//!
//! [`RewardAssignment::vector_for`]: crate::labels::RewardAssignment::vector_for

mod investment;
mod oracle;
mod pagerank;
mod propagation;
mod scores;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{GraphError, SourceGraph};

pub use investment::i_reliability;
pub use oracle::{linear_solve_oracle, OracleMode, ORACLE_MAX_NODES};
pub use pagerank::{pagerank, PageRankConfig};
pub use propagation::{f_reliability, fp_reliability, p_reliability};
pub use scores::{
    classify, classify_source, normalize_values, Classification, Prediction, Provenance, ReliabilityScores,
};

#[derive(Debug, Error)]
pub enum EstimateError {
    #[error("invalid estimator config: {0}")]
    InvalidConfig(String),
    #[error("{strategy} did not converge within {iterations} iterations (last delta {residual:e})")]
    NotConverged {
        strategy: Strategy,
        iterations: usize,
        residual: f64,
    },
    #[error("reward vector has {found} entries, graph has {expected} nodes")]
    RewardLength { expected: usize, found: usize },
    #[error("score maps cover different nodes")]
    CoverageMismatch,
    #[error("dense oracle limited to {max} nodes, graph has {nodes}")]
    OracleTooLarge { nodes: usize, max: usize },
    #[error("linear system is singular")]
    Singular,
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Strategy {
    #[serde(rename = "f")]
    Future,
    #[serde(rename = "p")]
    Past,
    #[serde(rename = "fp")]
    FuturePast,
    #[serde(rename = "i")]
    Investment,
    /// Mean of P and FP.
    #[serde(rename = "avg-p-fp")]
    AveragePastFuturePast,
    #[serde(rename = "pagerank")]
    PageRank,
}

impl Strategy {
    pub const ALL: [Strategy; 6] = [
        Strategy::Future,
        Strategy::Past,
        Strategy::FuturePast,
        Strategy::Investment,
        Strategy::AveragePastFuturePast,
        Strategy::PageRank,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Future => "f",
            Self::Past => "p",
            Self::FuturePast => "fp",
            Self::Investment => "i",
            Self::AveragePastFuturePast => "avg-p-fp",
            Self::PageRank => "pagerank",
        }
    }

    /// Whether the strategy is tuned through `gamma` (otherwise `n` or nothing).
    pub fn uses_gamma(self) -> bool {
        matches!(
            self,
            Self::Future | Self::Past | Self::FuturePast | Self::AveragePastFuturePast
        )
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Strategy::ALL
            .into_iter()
            .find(|st| st.name() == s.to_ascii_lowercase())
            .ok_or_else(|| format!("unknown strategy {s:?} (f|p|fp|i|avg-p-fp|pagerank)"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimatorConfig {
    /// Discount factor for F, P and FP; must lie in `[0, 1)`.
    pub gamma: f64,
    /// Invest/collect rounds for I.
    pub n: usize,
    pub tol: f64,
    pub max_iter: usize,
    /// Discount used by the FP half of the P/FP average; defaults to `gamma`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_fp: Option<f64>,
    pub damping: f64,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        Self {
            gamma: 0.3,
            n: 1,
            tol: 1e-8,
            max_iter: 10_000,
            gamma_fp: None,
            damping: 0.85,
        }
    }
}

impl EstimatorConfig {
    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = gamma;
        self
    }

    pub fn with_n(mut self, n: usize) -> Self {
        self.n = n;
        self
    }

    pub fn validate(&self) -> Result<(), EstimateError> {
        let bad = |msg: String| Err(EstimateError::InvalidConfig(msg));
        if !(0.0..1.0).contains(&self.gamma) {
            return bad(format!("gamma must be in [0, 1), got {}", self.gamma));
        }
        if let Some(g) = self.gamma_fp {
            if !(0.0..1.0).contains(&g) {
                return bad(format!("gamma_fp must be in [0, 1), got {g}"));
            }
        }
        if self.n == 0 {
            return bad("n must be at least 1".into());
        }
        if self.tol.is_nan() || self.tol <= 0.0 {
            return bad(format!("tol must be positive, got {}", self.tol));
        }
        if self.max_iter == 0 {
            return bad("max_iter must be at least 1".into());
        }
        if !(self.damping > 0.0 && self.damping < 1.0) {
            return bad(format!("damping must be in (0, 1), got {}", self.damping));
        }
        Ok(())
    }
}

/// Anything that turns a reward vector into reliability scores.
pub trait ReliabilityEstimator: Sync {
    fn estimate(&self, graph: &SourceGraph, rewards: &[f64]) -> Result<ReliabilityScores, EstimateError>;

    fn strategy(&self) -> Strategy;

    fn config(&self) -> EstimatorConfig;
}

/// A strategy paired with its hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimator {
    pub strategy: Strategy,
    pub config: EstimatorConfig,
}

impl Estimator {
    pub fn new(strategy: Strategy, config: EstimatorConfig) -> Self {
        Self { strategy, config }
    }
}

impl ReliabilityEstimator for Estimator {
    fn estimate(&self, graph: &SourceGraph, rewards: &[f64]) -> Result<ReliabilityScores, EstimateError> {
        let cfg = &self.config;
        match self.strategy {
            Strategy::Future => f_reliability(graph, rewards, cfg),
            Strategy::Past => p_reliability(graph, rewards, cfg),
            Strategy::FuturePast => fp_reliability(graph, rewards, cfg),
            Strategy::Investment => i_reliability(graph, rewards, cfg.n),
            Strategy::AveragePastFuturePast => {
                let p = p_reliability(graph, rewards, cfg)?;
                let fp_cfg = cfg.with_gamma(cfg.gamma_fp.unwrap_or(cfg.gamma));
                let fp = fp_reliability(graph, rewards, &fp_cfg)?;
                let mut avg = p.average(&fp)?;
                avg.provenance = Provenance {
                    strategy: Strategy::AveragePastFuturePast,
                    config: *cfg,
                    iterations: p.provenance.iterations + fp.provenance.iterations,
                    residual: p.provenance.residual.max(fp.provenance.residual),
                };
                Ok(avg)
            }
            Strategy::PageRank => {
                cfg.validate()?;
                let pr = PageRankConfig {
                    damping: cfg.damping,
                    tol: cfg.tol,
                    max_iter: cfg.max_iter,
                };
                pagerank(graph, &pr)
            }
        }
    }

    fn strategy(&self) -> Strategy {
        self.strategy
    }

    fn config(&self) -> EstimatorConfig {
        self.config
    }
}

pub(crate) fn check_rewards(graph: &SourceGraph, rewards: &[f64]) -> Result<(), EstimateError> {
    if rewards.len() != graph.node_count() {
        return Err(EstimateError::RewardLength {
            expected: graph.node_count(),
            found: rewards.len(),
        });
    }
    Ok(())
}

/// Below this many nodes a sweep runs on the calling thread.
const PAR_MIN_LEN: usize = 4096;

/// Fills `out[i] = f(i)`, in parallel when large. Each entry is computed
/// independently, so the result does not depend on the worker count.
pub(crate) fn sweep<F>(out: &mut [f64], f: F)
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    if out.len() < PAR_MIN_LEN {
        out.iter_mut().enumerate().for_each(|(i, v)| *v = f(i));
    } else {
        out.par_iter_mut()
            .with_min_len(PAR_MIN_LEN / 4)
            .enumerate()
            .for_each(|(i, v)| *v = f(i));
    }
}

pub(crate) fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    if a.len() < PAR_MIN_LEN {
        a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
    } else {
        a.par_iter()
            .zip(b)
            .with_min_len(PAR_MIN_LEN / 4)
            .map(|(x, y)| (x - y).abs())
            .reduce(|| 0.0, f64::max)
    }
}
