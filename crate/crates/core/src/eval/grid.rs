use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{cross_validate, CvOptions, EvalError};
use crate::estimators::{Estimator, Strategy};
use crate::graph::SourceGraph;
use crate::labels::LabeledDataset;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Hyperparameter {
    Gamma,
    N,
}

impl Hyperparameter {
    pub fn for_strategy(strategy: Strategy) -> Self {
        if strategy.uses_gamma() {
            Self::Gamma
        } else {
            Self::N
        }
    }

    /// 0.05..=0.95 in steps of 0.05 for γ; 1..=10 for n.
    pub fn default_grid(self) -> Vec<f64> {
        match self {
            Self::Gamma => (1..=19).map(|i| i as f64 / 20.0).collect(),
            Self::N => (1..=10).map(f64::from).collect(),
        }
    }

    fn apply(self, base: &Estimator, value: f64) -> Result<Estimator, EvalError> {
        let mut est = *base;
        match self {
            Self::Gamma => {
                if !(0.0..1.0).contains(&value) {
                    return Err(EvalError::InvalidGridValue(value, "gamma"));
                }
                est.config.gamma = value;
            }
            Self::N => {
                if value < 1.0 || value.fract() != 0.0 {
                    return Err(EvalError::InvalidGridValue(value, "n"));
                }
                est.config.n = value as usize;
            }
        }
        Ok(est)
    }
}

impl fmt::Display for Hyperparameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Gamma => "gamma",
            Self::N => "n",
        })
    }
}

impl FromStr for Hyperparameter {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "gamma" => Ok(Self::Gamma),
            "n" => Ok(Self::N),
            _ => Err(format!("unknown hyperparameter {s:?} (gamma|n)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub value: f64,
    pub mean_macro_f1: f64,
    pub std_macro_f1: f64,
    pub ci95: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSearchResult {
    pub strategy: Strategy,
    pub parameter: Hyperparameter,
    pub k: usize,
    pub seed: u64,
    pub points: Vec<GridPoint>,
    pub selected: f64,
    pub selected_macro_f1: f64,
    pub selection_rule: String,
}

impl GridSearchResult {
    /// `hyperparameter,mean,std,ci` rows in grid order.
    pub fn write_sweep_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{},mean,std,ci", self.parameter)?;
        for p in &self.points {
            writeln!(out, "{},{},{},{}", p.value, p.mean_macro_f1, p.std_macro_f1, p.ci95)?;
        }
        out.flush()
    }
}

/// Cross-validates every grid value and keeps the one with the best mean
/// macro-F1; ties go to the smaller value.
pub fn grid_search(
    base: &Estimator,
    parameter: Hyperparameter,
    grid: &[f64],
    graph: &SourceGraph,
    dataset: &LabeledDataset,
    k: usize,
    seed: u64,
) -> Result<GridSearchResult, EvalError> {
    if grid.is_empty() {
        return Err(EvalError::EmptyGrid);
    }
    let mut values = grid.to_vec();
    values.sort_by(f64::total_cmp);
    values.dedup();
    let estimators = values
        .iter()
        .map(|&v| parameter.apply(base, v))
        .collect::<Result<Vec<_>, _>>()?;

    let points = values
        .par_iter()
        .zip(&estimators)
        .map(|(&value, est)| {
            let report = cross_validate(est, graph, dataset, k, seed, CvOptions::default())?;
            Ok(GridPoint {
                value,
                mean_macro_f1: report.mean.macro_avg.f1,
                std_macro_f1: report.std.macro_avg.f1,
                ci95: report.ci95.macro_avg.f1,
            })
        })
        .collect::<Result<Vec<_>, EvalError>>()?;

    let mut best = points[0];
    for p in &points[1..] {
        if p.mean_macro_f1 > best.mean_macro_f1 {
            best = *p;
        }
    }
    Ok(GridSearchResult {
        strategy: base.strategy,
        parameter,
        k,
        seed,
        points,
        selected: best.value,
        selected_macro_f1: best.mean_macro_f1,
        selection_rule: "max-mean-macro-f1, ties to smaller value".into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grids() {
        let g = Hyperparameter::Gamma.default_grid();
        assert_eq!(g.len(), 19);
        assert_eq!(g[0], 0.05);
        assert_eq!(g[2], 0.15);
        assert_eq!(g[18], 0.95);
        assert_eq!(
            Hyperparameter::N.default_grid(),
            (1..=10).map(f64::from).collect::<Vec<_>>()
        );
    }

    #[test]
    fn parameter_for_strategy() {
        assert_eq!(Hyperparameter::for_strategy(Strategy::Past), Hyperparameter::Gamma);
        assert_eq!(Hyperparameter::for_strategy(Strategy::Investment), Hyperparameter::N);
    }
}
