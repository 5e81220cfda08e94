//! Invest-and-collect reliability.
//!
//! Each round, every source invests its current score along its outbound
//! weights; the total invested in a source is then paid back to its
//! investors in proportion to their share of its inbound links, and each
//! investor collects according to how much it put in:
//!
//! ```text
//! total(t)  = Σ_s w(s, t) ρ(s)
//! profit(s) = Σ_t w(s, t) · w_s(t) · total(t)
//! ρ(s)     += profit(s)
//! ```
//!
//! All totals are taken from the scores at the start of the round.

use super::{
    check_rewards, max_abs_diff, sweep, EstimateError, EstimatorConfig, Provenance, ReliabilityScores, Strategy,
};
use crate::graph::SourceGraph;

pub fn i_reliability(graph: &SourceGraph, rewards: &[f64], rounds: usize) -> Result<ReliabilityScores, EstimateError> {
    let config = EstimatorConfig::default().with_n(rounds);
    config.validate()?;
    check_rewards(graph, rewards)?;
    let adj = graph.adjacency()?;
    let n = graph.node_count();

    let mut rho = rewards.to_vec();
    let mut totals = vec![0.0; n];
    let mut next = vec![0.0; n];
    let mut residual = 0.0;
    for _ in 0..rounds {
        sweep(&mut totals, |t| {
            adj.inbound(t)
                .map(|e| adj.in_weights[e] * rho[adj.in_sources[e] as usize])
                .sum()
        });
        sweep(&mut next, |s| {
            let profit: f64 = adj
                .outbound(s)
                .map(|e| adj.out_weights[e] * adj.out_inbound_shares[e] * totals[adj.out_targets[e] as usize])
                .sum();
            rho[s] + profit
        });
        residual = max_abs_diff(&next, &rho);
        std::mem::swap(&mut rho, &mut next);
    }

    let provenance = Provenance {
        strategy: Strategy::Investment,
        config,
        iterations: rounds,
        residual,
    };
    Ok(ReliabilityScores::new(graph, rho, provenance))
}
