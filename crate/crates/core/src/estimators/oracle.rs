//! Exact fixed points by dense linear solve, for cross-checking the
//! iterative estimators on small graphs.
//!
//! Forward: `(I − γP) V = P r`. Reverse: `(I − γPᵀ) R = r`.
//!
//! The transition matrix is rebuilt here from the raw link counts so the
//! check does not share the normalization path of the estimators.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::{check_rewards, EstimateError};
use crate::graph::SourceGraph;

pub const ORACLE_MAX_NODES: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OracleMode {
    Forward,
    Reverse,
}

/// Scores aligned with `graph.nodes()`.
pub fn linear_solve_oracle(
    graph: &SourceGraph,
    rewards: &[f64],
    gamma: f64,
    mode: OracleMode,
) -> Result<Vec<f64>, EstimateError> {
    check_rewards(graph, rewards)?;
    let n = graph.node_count();
    if n > ORACLE_MAX_NODES {
        return Err(EstimateError::OracleTooLarge {
            nodes: n,
            max: ORACLE_MAX_NODES,
        });
    }
    if !(0.0..1.0).contains(&gamma) {
        return Err(EstimateError::InvalidConfig(format!(
            "gamma must be in [0, 1), got {gamma}"
        )));
    }

    let mut p = DMatrix::<f64>::zeros(n, n);
    let mut row_totals = vec![0u64; n];
    let pos = |id| graph.position(id).expect("edge endpoint is a node");
    for (src, dst, count) in graph.edges() {
        let (s, d) = (pos(src), pos(dst));
        p[(s, d)] += count as f64;
        row_totals[s] += count;
    }
    for (s, &total) in row_totals.iter().enumerate() {
        if total > 0 {
            p.row_mut(s).scale_mut(1.0 / total as f64);
        }
    }

    let r = DVector::from_column_slice(rewards);
    let (transition, rhs) = match mode {
        OracleMode::Forward => (p.clone(), &p * r),
        OracleMode::Reverse => (p.transpose(), r),
    };
    let system = DMatrix::<f64>::identity(n, n) - transition * gamma;
    let solution = system.lu().solve(&rhs).ok_or(EstimateError::Singular)?;
    Ok(solution.iter().copied().collect())
}
