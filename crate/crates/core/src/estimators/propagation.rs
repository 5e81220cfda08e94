//! Discounted reward propagation: forward (F), reverse (P) and their
//! sign-split combination (FP).

use super::{
    check_rewards, max_abs_diff, sweep, EstimateError, EstimatorConfig, Provenance, ReliabilityScores, Strategy,
};
use crate::graph::SourceGraph;

/// Synchronous value iteration from the zero vector. `step` writes the next
/// iterate from the current one.
fn value_iterate<F>(
    strategy: Strategy,
    graph: &SourceGraph,
    config: &EstimatorConfig,
    step: F,
) -> Result<ReliabilityScores, EstimateError>
where
    F: Fn(&[f64], usize) -> f64 + Sync + Send,
{
    let n = graph.node_count();
    let mut rho = vec![0.0; n];
    let mut next = vec![0.0; n];
    let mut delta = f64::INFINITY;
    for iteration in 1..=config.max_iter {
        sweep(&mut next, |s| step(&rho, s));
        delta = max_abs_diff(&next, &rho);
        std::mem::swap(&mut rho, &mut next);
        if delta < config.tol {
            let provenance = Provenance {
                strategy,
                config: *config,
                iterations: iteration,
                residual: delta,
            };
            return Ok(ReliabilityScores::new(graph, rho, provenance));
        }
    }
    Err(EstimateError::NotConverged {
        strategy,
        iterations: config.max_iter,
        residual: delta,
    })
}

/// Expected discounted reward collected by a walker leaving each source.
/// Sources without outbound links score 0.
pub fn f_reliability(
    graph: &SourceGraph,
    rewards: &[f64],
    config: &EstimatorConfig,
) -> Result<ReliabilityScores, EstimateError> {
    config.validate()?;
    check_rewards(graph, rewards)?;
    let adj = graph.adjacency()?;
    let gamma = config.gamma;
    value_iterate(Strategy::Future, graph, config, |rho, s| {
        adj.outbound(s)
            .map(|e| {
                let t = adj.out_targets[e] as usize;
                adj.out_weights[e] * (rewards[t] + gamma * rho[t])
            })
            .sum()
    })
}

/// Reward accumulated along the paths leading into each source; uses the
/// forward weights of the inbound edges.
pub fn p_reliability(
    graph: &SourceGraph,
    rewards: &[f64],
    config: &EstimatorConfig,
) -> Result<ReliabilityScores, EstimateError> {
    config.validate()?;
    check_rewards(graph, rewards)?;
    let adj = graph.adjacency()?;
    let gamma = config.gamma;
    value_iterate(Strategy::Past, graph, config, |rho, s| {
        let inflow: f64 = adj
            .inbound(s)
            .map(|e| adj.in_weights[e] * rho[adj.in_sources[e] as usize])
            .sum();
        rewards[s] + gamma * inflow
    })
}

/// F over the negative rewards plus P over the positive ones.
pub fn fp_reliability(
    graph: &SourceGraph,
    rewards: &[f64],
    config: &EstimatorConfig,
) -> Result<ReliabilityScores, EstimateError> {
    config.validate()?;
    check_rewards(graph, rewards)?;
    let negative: Vec<f64> = rewards.iter().map(|&r| r.min(0.0)).collect();
    let positive: Vec<f64> = rewards.iter().map(|&r| r.max(0.0)).collect();
    let future = f_reliability(graph, &negative, config)?;
    let past = p_reliability(graph, &positive, config)?;
    let mut sum = future.add(&past)?;
    sum.provenance = Provenance {
        strategy: Strategy::FuturePast,
        config: *config,
        iterations: future.provenance.iterations + past.provenance.iterations,
        residual: future.provenance.residual.max(past.provenance.residual),
    };
    Ok(sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::SourceId;

    fn id(s: &str) -> SourceId {
        SourceId::new(s).unwrap()
    }

    fn chain() -> SourceGraph {
        SourceGraph::default()
            .with_links(id("a"), id("b"), 1)
            .unwrap()
            .with_links(id("b"), id("c"), 1)
            .unwrap()
            .normalized()
    }

    fn cfg(gamma: f64) -> EstimatorConfig {
        EstimatorConfig::default().with_gamma(gamma)
    }

    fn close(actual: &[f64], expected: &[f64]) {
        for (a, e) in actual.iter().zip(expected) {
            assert!((a - e).abs() < 1e-9, "{actual:?} != {expected:?}");
        }
    }

    #[test]
    fn forward_chain() {
        // nodes sort as a, b, c
        let s = f_reliability(&chain(), &[0.0, 0.0, 1.0], &cfg(0.5)).unwrap();
        close(s.values(), &[0.5, 1.0, 0.0]);
        assert_eq!(s.provenance.strategy, Strategy::Future);
    }

    #[test]
    fn reverse_chain() {
        let s = p_reliability(&chain(), &[0.0, 0.0, 1.0], &cfg(0.5)).unwrap();
        close(s.values(), &[0.0, 0.0, 1.0]);
        let s = p_reliability(&chain(), &[1.0, 0.0, 0.0], &cfg(0.5)).unwrap();
        close(s.values(), &[1.0, 0.5, 0.25]);
    }

    #[test]
    fn zero_rewards_give_zero() {
        let g = chain();
        for s in [
            f_reliability(&g, &[0.0; 3], &cfg(0.9)).unwrap(),
            p_reliability(&g, &[0.0; 3], &cfg(0.9)).unwrap(),
            fp_reliability(&g, &[0.0; 3], &cfg(0.9)).unwrap(),
        ] {
            assert!(s.values().iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn isolated_node() {
        let mut g = SourceGraph::default();
        g.add_node(id("a"));
        let g = g.normalized();
        assert_eq!(f_reliability(&g, &[1.0], &cfg(0.5)).unwrap().values(), &[0.0]);
        assert_eq!(p_reliability(&g, &[-1.0], &cfg(0.5)).unwrap().values(), &[-1.0]);
    }

    #[test]
    fn fp_reduces_to_halves() {
        let g = chain();
        let pos = [1.0, 0.0, 1.0];
        assert_eq!(
            fp_reliability(&g, &pos, &cfg(0.4)).unwrap().values(),
            p_reliability(&g, &pos, &cfg(0.4)).unwrap().values()
        );
        let neg = [0.0, -1.0, -1.0];
        assert_eq!(
            fp_reliability(&g, &neg, &cfg(0.4)).unwrap().values(),
            f_reliability(&g, &neg, &cfg(0.4)).unwrap().values()
        );
    }

    #[test]
    fn reports_non_convergence() {
        let g = chain();
        let config = EstimatorConfig {
            max_iter: 1,
            ..cfg(0.5)
        };
        match p_reliability(&g, &[1.0, 0.0, 0.0], &config) {
            Err(EstimateError::NotConverged {
                iterations: 1,
                residual,
                ..
            }) => assert_eq!(residual, 1.0),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let g = chain();
        assert!(matches!(
            f_reliability(&g, &[0.0; 2], &cfg(0.5)),
            Err(EstimateError::RewardLength { .. })
        ));
        assert!(matches!(
            f_reliability(&g, &[0.0; 3], &cfg(1.0)),
            Err(EstimateError::InvalidConfig(_))
        ));
        let stale = SourceGraph::default().with_links(id("a"), id("b"), 1).unwrap();
        assert!(matches!(
            f_reliability(&stale, &[0.0; 2], &cfg(0.5)),
            Err(EstimateError::Graph(_))
        ));
    }
}
