use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::EvalError;
use crate::graph::SourceId;
use crate::labels::{LabeledDataset, ReliabilityLabel};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fold {
    pub train: Vec<SourceId>,
    pub test: Vec<SourceId>,
}

/// Stratified k-fold partition. Members of each class are shuffled with a
/// seeded generator and dealt round-robin; the dealing position carries over
/// from one class to the next so fold sizes differ by at most one.
pub fn kfold_split(dataset: &LabeledDataset, k: usize, seed: u64) -> Result<Vec<Fold>, EvalError> {
    if k < 2 {
        return Err(EvalError::InvalidK(k));
    }
    let mut classes: BTreeMap<ReliabilityLabel, Vec<SourceId>> = BTreeMap::new();
    for (id, entry) in &dataset.entries {
        classes.entry(entry.label).or_default().push(id.clone());
    }
    for (label, members) in &classes {
        if members.len() < k {
            return Err(EvalError::ClassTooSmall {
                class: label.to_string(),
                members: members.len(),
                k,
            });
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tests: Vec<Vec<SourceId>> = vec![Vec::new(); k];
    let mut slot = 0;
    for members in classes.values_mut() {
        members.shuffle(&mut rng);
        for id in members.drain(..) {
            tests[slot].push(id);
            slot = (slot + 1) % k;
        }
    }

    let folds = (0..k)
        .map(|i| {
            let mut test = tests[i].clone();
            test.sort();
            let mut train: Vec<SourceId> = tests
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .flat_map(|(_, t)| t.iter().cloned())
                .collect();
            train.sort();
            Fold { train, test }
        })
        .collect();
    Ok(folds)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dataset(reliable: usize, unreliable: usize) -> LabeledDataset {
        let mut ds = LabeledDataset::new("t");
        for i in 0..reliable {
            ds.insert(
                SourceId::new(format!("r{i}.com")).unwrap(),
                ReliabilityLabel::Reliable,
                "t",
            );
        }
        for i in 0..unreliable {
            ds.insert(
                SourceId::new(format!("u{i}.com")).unwrap(),
                ReliabilityLabel::Unreliable,
                "t",
            );
        }
        ds
    }

    #[test]
    fn stratified_counts() {
        let ds = dataset(10, 5);
        let folds = kfold_split(&ds, 5, 7).unwrap();
        for fold in &folds {
            let reliable = fold.test.iter().filter(|id| id.as_str().starts_with('r')).count();
            assert_eq!((reliable, fold.test.len() - reliable), (2, 1));
            assert_eq!(fold.train.len(), 12);
        }
    }

    #[test]
    fn folds_partition_the_dataset() {
        let ds = dataset(23, 9);
        let folds = kfold_split(&ds, 5, 1).unwrap();
        let mut all: Vec<_> = folds.iter().flat_map(|f| f.test.iter().cloned()).collect();
        all.sort();
        assert_eq!(all, ds.entries.keys().cloned().collect::<Vec<_>>());
        let sizes: Vec<_> = folds.iter().map(|f| f.test.len()).collect();
        assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
    }

    #[test]
    fn deterministic_per_seed() {
        let ds = dataset(30, 12);
        assert_eq!(kfold_split(&ds, 5, 42).unwrap(), kfold_split(&ds, 5, 42).unwrap());
        assert_ne!(kfold_split(&ds, 5, 42).unwrap(), kfold_split(&ds, 5, 43).unwrap());
    }

    #[test]
    fn rejects_small_classes() {
        assert!(matches!(
            kfold_split(&dataset(10, 3), 5, 0),
            Err(EvalError::ClassTooSmall { members: 3, .. })
        ));
        assert!(matches!(
            kfold_split(&dataset(10, 3), 1, 0),
            Err(EvalError::InvalidK(1))
        ));
    }
}
