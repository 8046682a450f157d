//! Stratified k-fold splitting keyed on the full path label.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::label::HierLabel;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldPlan {
    pub k: usize,
    pub seed: u64,
    /// Fold index of every sample.
    pub assignment: Vec<usize>,
    /// Classes with fewer samples than folds.
    pub warnings: Vec<String>,
}

impl FoldPlan {
    pub fn test_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.assignment.len()).filter(|&i| self.assignment[i] == fold).collect()
    }

    pub fn train_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.assignment.len()).filter(|&i| self.assignment[i] != fold).collect()
    }
}

/// Shuffle each class with a seeded generator, then deal its members to
/// folds round-robin. The dealing position carries over from one class to
/// the next (classes in label order) so small classes spread across folds
/// and fold sizes stay within one sample of each other.
pub fn stratified_kfold(labels: &[HierLabel], k: usize, seed: u64) -> Result<FoldPlan> {
    if k < 2 {
        return Err(Error::contract("k-fold splitting needs k >= 2"));
    }
    if k > labels.len() {
        return Err(Error::contract(format!(
            "cannot split {} samples into {k} folds",
            labels.len()
        )));
    }
    let mut by_class: BTreeMap<&HierLabel, Vec<usize>> = BTreeMap::new();
    for (i, l) in labels.iter().enumerate() {
        by_class.entry(l).or_default().push(i);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut assignment = vec![0; labels.len()];
    let mut warnings = Vec::new();
    let mut next = 0;
    for (label, mut members) in by_class {
        if members.len() < k {
            warnings.push(format!(
                "class {label} has {} samples, fewer than {k} folds",
                members.len()
            ));
        }
        members.shuffle(&mut rng);
        for idx in members {
            assignment[idx] = next;
            next = (next + 1) % k;
        }
    }
    Ok(FoldPlan {
        k,
        seed,
        assignment,
        warnings,
    })
}
