use std::fmt;
use std::str::FromStr;

use log::warn;
use serde::{Deserialize, Serialize};

use super::stats::{pearson, spearman};
use super::EvalError;
use crate::estimators::{EstimatorConfig, ReliabilityEstimator, Strategy};
use crate::graph::{SourceGraph, SourceId};
use crate::labels::{RewardAssignment, ScoreTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CorrelationSetting {
    /// Every available reward is used.
    WithRewards,
    /// Rewards of the scored domains are zeroed before estimation.
    WithoutRewards,
}

impl fmt::Display for CorrelationSetting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::WithRewards => "with",
            Self::WithoutRewards => "without",
        })
    }
}

impl FromStr for CorrelationSetting {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "with" | "with-rewards" => Ok(Self::WithRewards),
            "without" | "without-rewards" => Ok(Self::WithoutRewards),
            _ => Err(format!("unknown setting {s:?} (with|without)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationResult {
    pub strategy: Strategy,
    pub config: EstimatorConfig,
    pub setting: CorrelationSetting,
    pub n: usize,
    pub pcc: f64,
    pub pcc_p: f64,
    pub srcc: f64,
    pub srcc_p: f64,
    /// Scored domains that are not graph nodes.
    pub excluded: Vec<SourceId>,
}

/// Correlates normalized ρ with journalist scores on the scored domains
/// present in the graph.
pub fn correlate(
    estimator: &dyn ReliabilityEstimator,
    graph: &SourceGraph,
    rewards: &RewardAssignment,
    scores: &ScoreTable,
    setting: CorrelationSetting,
) -> Result<CorrelationResult, EvalError> {
    let (present, excluded): (Vec<&SourceId>, Vec<&SourceId>) = scores.scores.keys().partition(|id| graph.contains(id));
    if present.is_empty() {
        return Err(EvalError::NoScoredDomains);
    }
    if !excluded.is_empty() {
        warn!(
            "{} scored domains are not in the graph and are excluded: {}",
            excluded.len(),
            excluded.iter().map(|id| id.as_str()).collect::<Vec<_>>().join(", ")
        );
    }

    let rewards = match setting {
        CorrelationSetting::WithRewards => rewards.clone(),
        CorrelationSetting::WithoutRewards => rewards.without(scores.scores.keys()),
    };
    let rho = estimator.estimate(graph, &rewards.vector_for(graph))?.normalized();

    let x: Vec<f64> = present.iter().map(|id| rho.rho(id)).collect();
    let y: Vec<f64> = present.iter().map(|id| scores.scores[*id]).collect();
    let p = pearson(&x, &y)?;
    let s = spearman(&x, &y)?;
    Ok(CorrelationResult {
        strategy: estimator.strategy(),
        config: estimator.config(),
        setting,
        n: present.len(),
        pcc: p.coefficient,
        pcc_p: p.p_value,
        srcc: s.coefficient,
        srcc_p: s.p_value,
        excluded: excluded.into_iter().cloned().collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::{EstimateError, Estimator, Provenance, ReliabilityScores};
    use crate::labels::Reward;
    use std::sync::Mutex;

    fn id(s: &str) -> SourceId {
        SourceId::new(s).unwrap()
    }

    fn chain() -> SourceGraph {
        let mut g = SourceGraph::default();
        for (a, b) in [
            ("a.com", "b.com"),
            ("b.com", "c.com"),
            ("c.com", "d.com"),
            ("d.com", "a.com"),
        ] {
            g.add_links(id(a), id(b), 1).unwrap();
        }
        g.normalized()
    }

    /// Records the rewards it sees and returns them as scores.
    struct Echo(Mutex<Vec<f64>>);

    impl ReliabilityEstimator for Echo {
        fn estimate(&self, graph: &SourceGraph, rewards: &[f64]) -> Result<ReliabilityScores, EstimateError> {
            *self.0.lock().unwrap() = rewards.to_vec();
            let values = rewards.iter().enumerate().map(|(i, r)| r + i as f64 * 0.1).collect();
            let provenance = Provenance {
                strategy: Strategy::Past,
                config: EstimatorConfig::default(),
                iterations: 0,
                residual: 0.0,
            };
            Ok(ReliabilityScores::new(graph, values, provenance))
        }

        fn strategy(&self) -> Strategy {
            Strategy::Past
        }

        fn config(&self) -> EstimatorConfig {
            EstimatorConfig::default()
        }
    }

    fn rewards() -> RewardAssignment {
        [
            (id("a.com"), Reward::Positive),
            (id("b.com"), Reward::Negative),
            (id("c.com"), Reward::Positive),
        ]
        .into_iter()
        .collect()
    }

    fn table(entries: &[(&str, f64)]) -> ScoreTable {
        ScoreTable {
            scores: entries.iter().map(|&(d, s)| (id(d), s)).collect(),
        }
    }

    #[test]
    fn without_setting_zeroes_scored_domains_only() {
        let g = chain();
        let echo = Echo(Mutex::new(Vec::new()));
        let scores = table(&[("a.com", 90.0), ("b.com", 10.0), ("d.com", 50.0)]);
        correlate(&echo, &g, &rewards(), &scores, CorrelationSetting::WithoutRewards).unwrap();
        // nodes sort a, b, c, d; only c keeps its reward
        assert_eq!(*echo.0.lock().unwrap(), vec![0.0, 0.0, 1.0, 0.0]);
        correlate(&echo, &g, &rewards(), &scores, CorrelationSetting::WithRewards).unwrap();
        assert_eq!(*echo.0.lock().unwrap(), vec![1.0, -1.0, 1.0, 0.0]);
    }

    #[test]
    fn excluded_domains_are_listed() {
        let g = chain();
        let est = Estimator::new(Strategy::Past, EstimatorConfig::default());
        let scores = table(&[("a.com", 90.0), ("b.com", 10.0), ("c.com", 80.0), ("zz.com", 50.0)]);
        let r = correlate(&est, &g, &rewards(), &scores, CorrelationSetting::WithRewards).unwrap();
        assert_eq!(r.n, 3);
        assert_eq!(r.excluded, vec![id("zz.com")]);
        assert!((-1.0..=1.0).contains(&r.pcc) && (0.0..=1.0).contains(&r.pcc_p));
    }

    #[test]
    fn disjoint_scores_rejected() {
        let est = Estimator::new(Strategy::Past, EstimatorConfig::default());
        let scores = table(&[("x.com", 1.0), ("y.com", 2.0), ("z.com", 3.0)]);
        assert!(matches!(
            correlate(&est, &chain(), &rewards(), &scores, CorrelationSetting::WithRewards),
            Err(EvalError::NoScoredDomains)
        ));
    }
}
