//! News-source reliability estimation over a domain hyperlink graph.
//!
//! ```
//! use mediarel_core::estimators::{Estimator, EstimatorConfig, ReliabilityEstimator, Strategy};
//! use mediarel_core::graph::{SourceGraph, SourceId};
//!
//! let id = |s: &str| SourceId::new(s).unwrap();
//! let mut g = SourceGraph::default();
//! g.add_links(id("a.com"), id("b.com"), 1).unwrap();
//! g.add_links(id("b.com"), id("c.com"), 1).unwrap();
//! let g = g.normalized();
//!
//! // nodes are ordered a, b, c; only a carries a reward
//! let est = Estimator::new(Strategy::Past, EstimatorConfig::default().with_gamma(0.5));
//! let scores = est.estimate(&g, &[1.0, 0.0, 0.0]).unwrap();
//! assert!((scores.rho(&id("c.com")) - 0.25).abs() < 1e-7);
//! ```

pub mod estimators;
pub mod eval;
pub mod graph;
pub mod ingest;
pub mod labels;

pub use estimators::{Estimator, EstimatorConfig, ReliabilityEstimator, ReliabilityScores, Strategy};
pub use graph::{SelfLinks, SourceGraph, SourceId};
pub use labels::{LabeledDataset, RewardAssignment};
