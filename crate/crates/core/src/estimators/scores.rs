use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{EstimateError, EstimatorConfig, Strategy};
use crate::graph::{NodeTable, SourceGraph, SourceId};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub strategy: Strategy,
    pub config: EstimatorConfig,
    pub iterations: usize,
    /// Largest per-node change in the final sweep.
    pub residual: f64,
}

/// One score per graph node.
#[derive(Debug, Clone)]
pub struct ReliabilityScores {
    nodes: Arc<NodeTable>,
    values: Vec<f64>,
    pub provenance: Provenance,
}

impl PartialEq for ReliabilityScores {
    fn eq(&self, other: &Self) -> bool {
        self.nodes.ids() == other.nodes.ids() && self.values == other.values
    }
}

impl ReliabilityScores {
    pub(crate) fn new(graph: &SourceGraph, mut values: Vec<f64>, provenance: Provenance) -> Self {
        debug_assert_eq!(values.len(), graph.node_count());
        // empty float sums are -0.0; keep output free of signed zeros
        for v in &mut values {
            *v += 0.0;
        }
        Self {
            nodes: Arc::clone(graph.node_table()),
            values,
            provenance,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Scores aligned with [`ids`](Self::ids).
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn ids(&self) -> &[SourceId] {
        self.nodes.ids()
    }

    pub fn get(&self, id: &SourceId) -> Option<f64> {
        self.nodes.position(id).map(|i| self.values[i])
    }

    /// Score with out-of-graph sources treated as indeterminate (0).
    pub fn rho(&self, id: &SourceId) -> f64 {
        self.get(id).unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&SourceId, f64)> {
        self.nodes.ids().iter().zip(self.values.iter().copied())
    }

    pub fn to_map(&self) -> BTreeMap<SourceId, f64> {
        self.iter().map(|(id, v)| (id.clone(), v)).collect()
    }

    pub(crate) fn with_values(&self, mut values: Vec<f64>) -> Self {
        for v in &mut values {
            *v += 0.0;
        }
        Self {
            nodes: Arc::clone(&self.nodes),
            values,
            provenance: self.provenance,
        }
    }

    /// Positives divided by the largest positive score, negatives by the
    /// magnitude of the smallest negative one.
    pub fn normalized(&self) -> Self {
        self.with_values(normalize_values(&self.values))
    }

    /// Componentwise sum; both maps must cover the same nodes.
    pub fn add(&self, other: &Self) -> Result<Self, EstimateError> {
        self.combine(other, |a, b| a + b)
    }

    /// Componentwise mean; both maps must cover the same nodes.
    pub fn average(&self, other: &Self) -> Result<Self, EstimateError> {
        self.combine(other, |a, b| (a + b) / 2.0)
    }

    fn combine(&self, other: &Self, op: impl Fn(f64, f64) -> f64) -> Result<Self, EstimateError> {
        if self.nodes.ids() != other.nodes.ids() {
            return Err(EstimateError::CoverageMismatch);
        }
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| op(a, b)).collect();
        Ok(self.with_values(values))
    }

    /// Writes `domain<TAB>rho<TAB>rho_normalized`, highest score first, ties
    /// by domain.
    pub fn write_tsv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let normalized = normalize_values(&self.values);
        let mut order: Vec<usize> = (0..self.values.len()).collect();
        let ids = self.nodes.ids();
        order.sort_by(|&a, &b| {
            self.values[b]
                .total_cmp(&self.values[a])
                .then_with(|| ids[a].cmp(&ids[b]))
        });
        for i in order {
            writeln!(out, "{}\t{}\t{}", ids[i], self.values[i], normalized[i])?;
        }
        out.flush()
    }
}

pub fn normalize_values(values: &[f64]) -> Vec<f64> {
    let max = values.iter().copied().filter(|&v| v > 0.0).fold(0.0, f64::max);
    let min = values.iter().copied().filter(|&v| v < 0.0).fold(0.0, f64::min);
    values
        .iter()
        .map(|&v| {
            if v > 0.0 {
                v / max
            } else if v < 0.0 {
                v / -min
            } else {
                v
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Prediction {
    Reliable,
    Unreliable,
}

impl Prediction {
    /// `ρ > 0` is reliable; everything else, zero included, is not.
    pub fn from_score(rho: f64) -> Self {
        if rho > 0.0 {
            Self::Reliable
        } else {
            Self::Unreliable
        }
    }
}

impl fmt::Display for Prediction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Reliable => "reliable",
            Self::Unreliable => "unreliable",
        })
    }
}

impl FromStr for Prediction {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "reliable" => Ok(Self::Reliable),
            "unreliable" => Ok(Self::Unreliable),
            _ => Err(format!("unknown prediction {s:?} (reliable|unreliable)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub prediction: Prediction,
    pub rho: f64,
    /// `ρ = 0`: no evidence either way, which includes every source outside
    /// the graph.
    pub indeterminate: bool,
    pub in_graph: bool,
}

pub fn classify(scores: &ReliabilityScores) -> BTreeMap<SourceId, Prediction> {
    scores
        .iter()
        .map(|(id, rho)| (id.clone(), Prediction::from_score(rho)))
        .collect()
}

pub fn classify_source(scores: &ReliabilityScores, id: &SourceId) -> Classification {
    let in_graph = scores.get(id).is_some();
    let rho = scores.rho(id);
    Classification {
        prediction: Prediction::from_score(rho),
        rho,
        indeterminate: rho == 0.0,
        in_graph,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::EstimatorConfig;

    fn scores(pairs: &[(&str, f64)]) -> ReliabilityScores {
        let mut g = SourceGraph::default();
        for (name, _) in pairs {
            g.add_node(SourceId::new(*name).unwrap());
        }
        let g = g.normalized();
        let map: BTreeMap<&str, f64> = pairs.iter().copied().collect();
        let values = g.nodes().iter().map(|id| map[id.as_str()]).collect();
        let provenance = Provenance {
            strategy: Strategy::Past,
            config: EstimatorConfig::default(),
            iterations: 0,
            residual: 0.0,
        };
        ReliabilityScores::new(&g, values, provenance)
    }

    #[test]
    fn normalization() {
        assert_eq!(normalize_values(&[2.0, 1.0, -4.0, -1.0]), vec![1.0, 0.5, -1.0, -0.25]);
        assert_eq!(normalize_values(&[3.0, 6.0]), vec![0.5, 1.0]);
        assert_eq!(normalize_values(&[0.0, 0.0]), vec![0.0, 0.0]);
        assert_eq!(normalize_values(&[0.0, -2.0]), vec![0.0, -1.0]);
    }

    #[test]
    fn sign_threshold() {
        let s = scores(&[("a", 0.3), ("b", 0.0), ("c", -0.3)]);
        let c = classify(&s);
        let id = |x: &str| SourceId::new(x).unwrap();
        assert_eq!(c[&id("a")], Prediction::Reliable);
        assert_eq!(c[&id("b")], Prediction::Unreliable);
        assert_eq!(c[&id("c")], Prediction::Unreliable);

        let b = classify_source(&s, &id("b"));
        assert!(b.indeterminate && b.in_graph);
        let outside = classify_source(&s, &id("elsewhere.com"));
        assert_eq!(outside.prediction, Prediction::Unreliable);
        assert!(outside.indeterminate && !outside.in_graph);
        assert_eq!(outside.rho, 0.0);
    }

    #[test]
    fn tsv_sorted_descending() {
        let s = scores(&[("a", 2.0), ("b", -4.0), ("c", 1.0), ("d", 1.0)]);
        let mut buf = Vec::new();
        s.write_tsv(&mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "a\t2\t1\nc\t1\t0.5\nd\t1\t0.5\nb\t-4\t-1\n"
        );
    }

    #[test]
    fn averaging() {
        let a = scores(&[("a", 1.0)]);
        let b = scores(&[("a", 0.0)]);
        assert_eq!(a.average(&b).unwrap().values(), &[0.5]);
        assert_eq!(a.average(&a).unwrap(), a);
        let c = scores(&[("z", 0.0)]);
        assert!(matches!(a.average(&c), Err(EstimateError::CoverageMismatch)));
    }
}
