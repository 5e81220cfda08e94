use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::EvalError;
use crate::estimators::Prediction;
use crate::graph::SourceId;

/// Precision, recall and F1 on a 0-100 scale.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ConfusionMetrics {
    pub reliable: ClassMetrics,
    pub unreliable: ClassMetrics,
    /// Unweighted mean of the two classes.
    pub macro_avg: ClassMetrics,
    pub accuracy: f64,
}

impl ConfusionMetrics {
    pub const LEN: usize = 10;

    pub fn to_array(&self) -> [f64; Self::LEN] {
        [
            self.reliable.precision,
            self.reliable.recall,
            self.reliable.f1,
            self.unreliable.precision,
            self.unreliable.recall,
            self.unreliable.f1,
            self.macro_avg.precision,
            self.macro_avg.recall,
            self.macro_avg.f1,
            self.accuracy,
        ]
    }

    pub fn from_array(a: [f64; Self::LEN]) -> Self {
        let class = |i: usize| ClassMetrics {
            precision: a[i],
            recall: a[i + 1],
            f1: a[i + 2],
        };
        Self {
            reliable: class(0),
            unreliable: class(3),
            macro_avg: class(6),
            accuracy: a[9],
        }
    }

    /// From `(gold, predicted)` pairs. Undefined ratios count as 0.
    pub fn from_pairs<I>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (Prediction, Prediction)>,
    {
        // [gold][predicted], 0 = reliable
        let mut m = [[0u64; 2]; 2];
        let idx = |p: Prediction| match p {
            Prediction::Reliable => 0,
            Prediction::Unreliable => 1,
        };
        for (gold, pred) in pairs {
            m[idx(gold)][idx(pred)] += 1;
        }
        let ratio = |num: u64, den: u64| if den == 0 { 0.0 } else { 100.0 * num as f64 / den as f64 };
        let class = |c: usize| {
            let tp = m[c][c];
            let predicted = m[0][c] + m[1][c];
            let actual = m[c][0] + m[c][1];
            let precision = ratio(tp, predicted);
            let recall = ratio(tp, actual);
            let f1 = if precision + recall == 0.0 {
                0.0
            } else {
                2.0 * precision * recall / (precision + recall)
            };
            ClassMetrics { precision, recall, f1 }
        };
        let reliable = class(0);
        let unreliable = class(1);
        let macro_avg = ClassMetrics {
            precision: (reliable.precision + unreliable.precision) / 2.0,
            recall: (reliable.recall + unreliable.recall) / 2.0,
            f1: (reliable.f1 + unreliable.f1) / 2.0,
        };
        let total = m[0][0] + m[0][1] + m[1][0] + m[1][1];
        Self {
            reliable,
            unreliable,
            macro_avg,
            accuracy: ratio(m[0][0] + m[1][1], total),
        }
    }
}

pub fn metrics(
    predictions: &BTreeMap<SourceId, Prediction>,
    gold: &BTreeMap<SourceId, Prediction>,
) -> Result<ConfusionMetrics, EvalError> {
    let mismatched = predictions.keys().filter(|k| !gold.contains_key(*k)).count()
        + gold.keys().filter(|k| !predictions.contains_key(*k)).count();
    if mismatched > 0 {
        return Err(EvalError::KeyMismatch(mismatched));
    }
    Ok(ConfusionMetrics::from_pairs(
        gold.iter().map(|(id, &g)| (g, predictions[id])),
    ))
}
