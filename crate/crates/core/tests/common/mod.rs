#![allow(dead_code)]

use mediarel_core::graph::{SourceGraph, SourceId};
use mediarel_core::labels::{LabeledDataset, ReliabilityLabel};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn id(s: &str) -> SourceId {
    SourceId::new(s).unwrap()
}

pub fn node(i: usize) -> SourceId {
    SourceId::new(format!("n{i:05}.com")).unwrap()
}

/// `nodes` sources and roughly `edges` distinct links with counts in 1..=5.
pub fn random_graph(seed: u64, nodes: usize, edges: usize) -> SourceGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = SourceGraph::default();
    for i in 0..nodes {
        g.add_node(node(i));
    }
    for _ in 0..edges {
        let s = rng.random_range(0..nodes);
        let t = rng.random_range(0..nodes);
        if s != t {
            g.add_links(node(s), node(t), rng.random_range(1..=5)).unwrap();
        }
    }
    g.normalized()
}

/// Rewards in {-1, 0, 1}, about a third of each.
pub fn random_rewards(seed: u64, n: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    (0..n).map(|_| rng.random_range(-1i32..=1) as f64).collect()
}

pub struct Planted {
    pub graph: SourceGraph,
    pub dataset: LabeledDataset,
}

/// Two homophilous groups: `r*` sources are reliable, `u*` unreliable. Each
/// ordered pair is linked once with probability `p_in` inside a group and
/// `p_out` across; `labeled` of the nodes (chosen at random) carry labels.
pub fn planted_partition(seed: u64, per_group: usize, p_in: f64, p_out: f64, labeled: f64) -> Planted {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let name = |i: usize| {
        let (prefix, k) = if i < per_group { ('r', i) } else { ('u', i - per_group) };
        SourceId::new(format!("{prefix}{k:04}.com")).unwrap()
    };
    let n = 2 * per_group;
    let mut g = SourceGraph::default();
    for i in 0..n {
        g.add_node(name(i));
    }
    for s in 0..n {
        for t in 0..n {
            if s == t {
                continue;
            }
            let p = if (s < per_group) == (t < per_group) {
                p_in
            } else {
                p_out
            };
            if rng.random_bool(p) {
                g.add_links(name(s), name(t), 1).unwrap();
            }
        }
    }
    let mut dataset = LabeledDataset::new("planted");
    for i in sample(&mut rng, n, (labeled * n as f64).round() as usize) {
        let label = if i < per_group {
            ReliabilityLabel::Reliable
        } else {
            ReliabilityLabel::Unreliable
        };
        dataset.insert(name(i), label, "synthetic");
    }
    Planted {
        graph: g.normalized(),
        dataset,
    }
}
