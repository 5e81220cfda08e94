mod common;

use common::{id, node, random_graph, random_rewards};
use mediarel_core::estimators::{
    classify, f_reliability, fp_reliability, i_reliability, linear_solve_oracle, p_reliability, pagerank, Estimator,
    EstimatorConfig, OracleMode, PageRankConfig, ReliabilityEstimator, Strategy,
};
use mediarel_core::graph::SourceGraph;
use proptest::prelude::*;
use proptest::strategy::Strategy as _;

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Linearity holds for the fixed point; the stopping rule is absolute, so
/// iterate far past the tolerance used in the comparisons.
fn tight(gamma: f64) -> EstimatorConfig {
    EstimatorConfig {
        tol: 1e-13,
        ..EstimatorConfig::default().with_gamma(gamma)
    }
}

fn scaled(r: &[f64], c: f64) -> Vec<f64> {
    r.iter().map(|v| c * v).collect()
}

fn small_graph() -> impl proptest::strategy::Strategy<Value = (SourceGraph, Vec<f64>)> {
    (2usize..30, any::<u64>(), 0.0f64..0.3).prop_map(|(n, seed, density)| {
        let edges = (density * (n * n) as f64) as usize;
        let g = random_graph(seed, n, edges);
        let r = random_rewards(seed, n);
        (g, r)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn iteration_matches_dense_solve((g, r) in small_graph(), gamma in 0.0f64..0.95) {
        let cfg = EstimatorConfig::default().with_gamma(gamma);
        let f = f_reliability(&g, &r, &cfg).unwrap();
        let p = p_reliability(&g, &r, &cfg).unwrap();
        let fo = linear_solve_oracle(&g, &r, gamma, OracleMode::Forward).unwrap();
        let po = linear_solve_oracle(&g, &r, gamma, OracleMode::Reverse).unwrap();
        prop_assert!(max_diff(f.values(), &fo) < 1e-6);
        prop_assert!(max_diff(p.values(), &po) < 1e-6);
    }

    #[test]
    fn dense_solve_is_linear((g, r) in small_graph(), gamma in 0.0f64..0.95) {
        for mode in [OracleMode::Forward, OracleMode::Reverse] {
            let base = linear_solve_oracle(&g, &r, gamma, mode).unwrap();
            let neg = linear_solve_oracle(&g, &scaled(&r, -1.0), gamma, mode).unwrap();
            prop_assert!(max_diff(&neg, &scaled(&base, -1.0)) < 1e-12);
        }
    }

    #[test]
    fn odd_strategies_are_linear((g, r) in small_graph(), gamma in 0.0f64..0.9, n in 1usize..5) {
        let cfg = tight(gamma).with_n(n);
        for strategy in [Strategy::Future, Strategy::Past, Strategy::Investment] {
            let est = Estimator::new(strategy, cfg);
            let base = est.estimate(&g, &r).unwrap();
            for c in [-1.0, 2.0, 0.5] {
                let got = est.estimate(&g, &scaled(&r, c)).unwrap();
                let want = scaled(base.values(), c);
                let tol = 1e-9 * (1.0 + want.iter().fold(0.0f64, |m, v| m.max(v.abs())));
                prop_assert!(max_diff(got.values(), &want) <= tol, "{strategy} c={c}");
            }
        }
    }

    #[test]
    fn fp_is_positively_homogeneous((g, r) in small_graph(), gamma in 0.0f64..0.9) {
        let cfg = tight(gamma);
        let base = fp_reliability(&g, &r, &cfg).unwrap();
        let doubled = fp_reliability(&g, &scaled(&r, 2.0), &cfg).unwrap();
        prop_assert!(max_diff(doubled.values(), &scaled(base.values(), 2.0)) < 1e-9);
        prop_assert_eq!(classify(&doubled), classify(&base));
    }

    /// Negating rewards swaps which half of FP each reward feeds.
    #[test]
    fn fp_negation_swaps_halves((g, r) in small_graph(), gamma in 0.0f64..0.9) {
        let cfg = EstimatorConfig::default().with_gamma(gamma);
        let pos: Vec<f64> = r.iter().map(|v| v.max(0.0)).collect();
        let neg: Vec<f64> = r.iter().map(|v| v.min(0.0)).collect();
        let flipped = fp_reliability(&g, &scaled(&r, -1.0), &cfg).unwrap();
        let f = f_reliability(&g, &pos, &cfg).unwrap();
        let p = p_reliability(&g, &neg, &cfg).unwrap();
        let want: Vec<f64> = f.values().iter().zip(p.values()).map(|(a, b)| -(a + b)).collect();
        prop_assert!(max_diff(flipped.values(), &want) < 1e-12);
    }

    #[test]
    fn fp_is_sum_of_clipped_runs((g, r) in small_graph(), gamma in 0.0f64..0.9) {
        let cfg = EstimatorConfig::default().with_gamma(gamma);
        let fp = fp_reliability(&g, &r, &cfg).unwrap();
        let neg: Vec<f64> = r.iter().map(|v| v.min(0.0)).collect();
        let pos: Vec<f64> = r.iter().map(|v| v.max(0.0)).collect();
        let f = f_reliability(&g, &neg, &cfg).unwrap();
        let p = p_reliability(&g, &pos, &cfg).unwrap();
        for i in 0..g.node_count() {
            prop_assert!((fp.values()[i] - (f.values()[i] + p.values()[i])).abs() <= 1e-12);
        }
    }

    #[test]
    fn zero_rewards_give_zero_scores((g, _) in small_graph(), gamma in 0.0f64..0.9) {
        let zero = vec![0.0; g.node_count()];
        let cfg = EstimatorConfig::default().with_gamma(gamma).with_n(3);
        for strategy in [Strategy::Future, Strategy::Past, Strategy::FuturePast, Strategy::Investment] {
            let s = Estimator::new(strategy, cfg).estimate(&g, &zero).unwrap();
            prop_assert!(s.values().iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn future_scores_are_bounded((g, r) in small_graph(), gamma in 0.0f64..0.95) {
        let f = f_reliability(&g, &r, &EstimatorConfig::default().with_gamma(gamma)).unwrap();
        let bound = 1.0 / (1.0 - gamma) + 1e-9;
        prop_assert!(f.values().iter().all(|v| v.abs() <= bound));
    }

    #[test]
    fn pagerank_is_a_distribution((g, _) in small_graph()) {
        let pr = pagerank(&g, &PageRankConfig::default()).unwrap();
        prop_assert!((pr.values().iter().sum::<f64>() - 1.0).abs() < 1e-9);
        prop_assert!(pr.values().iter().all(|&v| v > 0.0));
    }
}

#[test]
fn star_hub_ranks_first() {
    let mut g = SourceGraph::default();
    for i in 1..8 {
        g.add_links(node(i), node(0), 1).unwrap();
    }
    let pr = pagerank(&g.normalized(), &PageRankConfig::default()).unwrap();
    let hub = pr.rho(&node(0));
    assert!(pr.iter().filter(|(k, _)| **k != node(0)).all(|(_, v)| v < hub));
}

#[test]
fn hand_chain_through_public_api() {
    let g = SourceGraph::default()
        .with_links(id("a"), id("b"), 1)
        .unwrap()
        .with_links(id("b"), id("c"), 1)
        .unwrap()
        .normalized();
    let cfg = EstimatorConfig::default().with_gamma(0.5);
    let f = f_reliability(&g, &[0.0, 0.0, 1.0], &cfg).unwrap();
    let p = p_reliability(&g, &[1.0, 0.0, 0.0], &cfg).unwrap();
    assert!(max_diff(f.values(), &[0.5, 1.0, 0.0]) < 1e-9);
    assert!(max_diff(p.values(), &[1.0, 0.5, 0.25]) < 1e-9);
    let single = SourceGraph::default()
        .with_links(id("a"), id("b"), 1)
        .unwrap()
        .normalized();
    let i = i_reliability(&single, &[1.0, 0.0], 1).unwrap();
    assert_eq!(i.values(), &[2.0, 0.0]);
}

/// Large enough that sweeps split across workers.
#[test]
fn results_do_not_depend_on_thread_count() {
    let g = random_graph(11, 9000, 90_000);
    let r = random_rewards(11, g.node_count());
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| {
            [
                Strategy::Future,
                Strategy::Past,
                Strategy::FuturePast,
                Strategy::Investment,
                Strategy::PageRank,
            ]
            .map(|s| {
                let cfg = EstimatorConfig::default().with_gamma(0.5).with_n(2);
                Estimator::new(s, cfg).estimate(&g, &r).unwrap().values().to_vec()
            })
        })
    };
    let one = run(1);
    for threads in [2, 4, 7] {
        let many = run(threads);
        for (a, b) in one.iter().zip(&many) {
            assert!(
                a.iter().zip(b).all(|(x, y)| x.to_bits() == y.to_bits()),
                "{threads} threads"
            );
        }
    }
}

#[test]
fn repeated_runs_are_bit_identical() {
    let g = random_graph(5, 300, 3000);
    let r = random_rewards(5, g.node_count());
    for s in Strategy::ALL {
        let est = Estimator::new(s, EstimatorConfig::default().with_gamma(0.7).with_n(3));
        assert_eq!(est.estimate(&g, &r).unwrap(), est.estimate(&g, &r).unwrap(), "{s}");
    }
}
