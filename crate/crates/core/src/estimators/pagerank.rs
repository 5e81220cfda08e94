//! Damped PageRank over the outbound weights, used as a popularity baseline.
//! Dangling-node mass is spread uniformly over all nodes.

use super::{max_abs_diff, sweep, EstimateError, EstimatorConfig, Provenance, ReliabilityScores, Strategy};
use crate::graph::SourceGraph;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PageRankConfig {
    pub damping: f64,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for PageRankConfig {
    fn default() -> Self {
        Self {
            damping: 0.85,
            tol: 1e-10,
            max_iter: 10_000,
        }
    }
}

pub fn pagerank(graph: &SourceGraph, config: &PageRankConfig) -> Result<ReliabilityScores, EstimateError> {
    if !(config.damping > 0.0 && config.damping < 1.0) {
        return Err(EstimateError::InvalidConfig(format!(
            "damping must be in (0, 1), got {}",
            config.damping
        )));
    }
    let adj = graph.adjacency()?;
    let n = graph.node_count();
    let provenance = |iterations, residual| Provenance {
        strategy: Strategy::PageRank,
        config: EstimatorConfig {
            damping: config.damping,
            tol: config.tol,
            max_iter: config.max_iter,
            ..EstimatorConfig::default()
        },
        iterations,
        residual,
    };
    if n == 0 {
        return Ok(ReliabilityScores::new(graph, Vec::new(), provenance(0, 0.0)));
    }

    let d = config.damping;
    let uniform = 1.0 / n as f64;
    let dangling: Vec<usize> = (0..n).filter(|&s| adj.outbound(s).is_empty()).collect();
    let mut rank = vec![uniform; n];
    let mut next = vec![0.0; n];
    let mut delta = f64::INFINITY;
    for iteration in 1..=config.max_iter {
        let dangling_mass: f64 = dangling.iter().map(|&s| rank[s]).sum();
        let base = (1.0 - d) * uniform + d * dangling_mass * uniform;
        sweep(&mut next, |t| {
            let inflow: f64 = adj
                .inbound(t)
                .map(|e| adj.in_weights[e] * rank[adj.in_sources[e] as usize])
                .sum();
            base + d * inflow
        });
        // keep the vector stochastic against rounding drift
        let total: f64 = next.iter().sum();
        next.iter_mut().for_each(|v| *v /= total);
        delta = max_abs_diff(&next, &rank);
        std::mem::swap(&mut rank, &mut next);
        if delta < config.tol {
            return Ok(ReliabilityScores::new(graph, rank, provenance(iteration, delta)));
        }
    }
    Err(EstimateError::NotConverged {
        strategy: Strategy::PageRank,
        iterations: config.max_iter,
        residual: delta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::SourceId;

    fn id(s: &str) -> SourceId {
        SourceId::new(s).unwrap()
    }

    #[test]
    fn symmetric_pair() {
        let g = SourceGraph::default()
            .with_links(id("a"), id("b"), 1)
            .unwrap()
            .with_links(id("b"), id("a"), 1)
            .unwrap()
            .normalized();
        let pr = pagerank(&g, &PageRankConfig::default()).unwrap();
        for v in pr.values() {
            assert!((v - 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn sums_to_one_with_dangling_nodes() {
        let g = SourceGraph::default()
            .with_links(id("a"), id("b"), 3)
            .unwrap()
            .with_links(id("a"), id("c"), 1)
            .unwrap()
            .with_links(id("c"), id("d"), 1)
            .unwrap()
            .normalized();
        let pr = pagerank(&g, &PageRankConfig::default()).unwrap();
        assert!((pr.values().iter().sum::<f64>() - 1.0).abs() < 1e-9);
        assert!(pr.values().iter().all(|&v| v > 0.0));
    }

    #[test]
    fn empty_graph() {
        let g = SourceGraph::default().normalized();
        assert!(pagerank(&g, &PageRankConfig::default()).unwrap().is_empty());
    }
}
