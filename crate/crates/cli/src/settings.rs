use std::path::Path;

use mediarel_core::estimators::{Estimator, EstimatorConfig, Strategy};
use mediarel_core::graph::SelfLinks;
use mediarel_core::labels::{ExpsetMode, RewardPolicy};
use serde::Deserialize;

use crate::args::{EstimatorArgs, FoldArgs};
use crate::error::CliError;

/// Contents of the `--config` file. Every key is optional and any flag given
/// on the command line wins.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct FileConfig {
    pub threads: Option<usize>,
    pub keep_self_links: Option<bool>,
    pub strategy: Option<Strategy>,
    pub gamma: Option<f64>,
    pub gamma_fp: Option<f64>,
    pub n: Option<usize>,
    pub tol: Option<f64>,
    pub max_iter: Option<usize>,
    pub damping: Option<f64>,
    pub expset: Option<ExpsetMode>,
    pub reward_policy: Option<RewardPolicy>,
    pub k: Option<usize>,
    pub seed: Option<u64>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        toml::from_str(&text).map_err(|e| CliError::config(e.to_string()).at(path))
    }
}

/// Grid-search winners by strategy and experiment set.
pub fn tuned_gamma(strategy: Strategy, expset: ExpsetMode) -> f64 {
    use ExpsetMode::*;
    match (strategy, expset) {
        (Strategy::Future, B) => 0.5,
        (Strategy::Future, _) => 0.05,
        (Strategy::Past | Strategy::AveragePastFuturePast, A) => 0.15,
        (Strategy::Past | Strategy::AveragePastFuturePast, B) => 0.3,
        (Strategy::Past | Strategy::AveragePastFuturePast, BMinus) => 0.2,
        (Strategy::FuturePast, A) => 0.1,
        (Strategy::FuturePast, _) => 0.05,
        _ => EstimatorConfig::default().gamma,
    }
}

pub fn tuned_n(expset: ExpsetMode) -> usize {
    match expset {
        ExpsetMode::BMinus => 2,
        _ => 1,
    }
}

pub struct Settings {
    file: FileConfig,
    keep_self_links: bool,
}

impl Settings {
    pub fn new(file: FileConfig, keep_self_links_flag: bool) -> Self {
        Self {
            keep_self_links: keep_self_links_flag || file.keep_self_links.unwrap_or(false),
            file,
        }
    }

    pub fn threads(&self, flag: Option<usize>) -> Option<usize> {
        flag.or(self.file.threads)
    }

    pub fn self_links(&self) -> SelfLinks {
        if self.keep_self_links {
            SelfLinks::Keep
        } else {
            SelfLinks::Drop
        }
    }

    pub fn expset(&self, args: &EstimatorArgs) -> ExpsetMode {
        args.expset.or(self.file.expset).unwrap_or(ExpsetMode::B)
    }

    pub fn reward_policy(&self, flag: Option<RewardPolicy>, expset: ExpsetMode) -> RewardPolicy {
        flag.or(self.file.reward_policy).unwrap_or(match expset {
            ExpsetMode::BMinus => RewardPolicy::Strict,
            _ => RewardPolicy::Merged,
        })
    }

    pub fn folds(&self, args: &FoldArgs) -> Result<(usize, u64), CliError> {
        let k = args.k.or(self.file.k).unwrap_or(5);
        if k < 2 {
            return Err(CliError::config(format!("k must be at least 2, got {k}")));
        }
        Ok((k, args.seed.or(self.file.seed).unwrap_or(0)))
    }

    /// Validated estimator; unset hyperparameters take the tuned value for
    /// the strategy and experiment set.
    pub fn estimator(&self, args: &EstimatorArgs) -> Result<Estimator, CliError> {
        let f = &self.file;
        let strategy = args.strategy.or(f.strategy).unwrap_or(Strategy::Past);
        let expset = self.expset(args);
        let defaults = EstimatorConfig::default();
        let config = EstimatorConfig {
            gamma: args.gamma.or(f.gamma).unwrap_or_else(|| tuned_gamma(strategy, expset)),
            gamma_fp: args
                .gamma_fp
                .or(f.gamma_fp)
                .or((strategy == Strategy::AveragePastFuturePast).then(|| tuned_gamma(Strategy::FuturePast, expset))),
            n: args.n.or(f.n).unwrap_or_else(|| tuned_n(expset)),
            tol: args.tol.or(f.tol).unwrap_or(defaults.tol),
            max_iter: args.max_iter.or(f.max_iter).unwrap_or(defaults.max_iter),
            damping: args.damping.or(f.damping).unwrap_or(defaults.damping),
        };
        config.validate()?;
        Ok(Estimator::new(strategy, config))
    }
}
