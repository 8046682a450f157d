//! Stratified k-fold evaluation of hierarchical models.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classifier::{BaseConfig, BaseKind};
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::folds::{stratified_kfold, FoldPlan};
use crate::hier::train_hier;
use crate::metrics::{hier_metrics, HierMetrics};
use crate::strategy::Strategy;
use crate::taxonomy::Taxonomy;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvReport {
    pub strategy: Strategy,
    pub base: BaseKind,
    pub folds: Vec<HierMetrics>,
    pub warnings: Vec<String>,
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample standard deviation; 0 for fewer than two values.
pub fn sample_std(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64).sqrt()
}

impl CvReport {
    pub fn hf_values(&self) -> Vec<f64> {
        self.folds.iter().map(|m| m.hf).collect()
    }

    pub fn mean_hp(&self) -> f64 {
        mean(&self.folds.iter().map(|m| m.hp).collect::<Vec<_>>())
    }

    pub fn mean_hr(&self) -> f64 {
        mean(&self.folds.iter().map(|m| m.hr).collect::<Vec<_>>())
    }

    pub fn mean_hf(&self) -> f64 {
        mean(&self.hf_values())
    }

    pub fn std_hf(&self) -> f64 {
        sample_std(&self.hf_values())
    }

    /// Mean level-wise hF over the folds where the level is defined.
    pub fn mean_level_f(&self) -> Vec<Option<f64>> {
        let levels = self.folds.iter().map(|m| m.per_level.len()).max().unwrap_or(0);
        (0..levels)
            .map(|l| {
                let vals: Vec<f64> = self.folds.iter().filter_map(|m| m.per_level.get(l).copied().flatten()).collect();
                (!vals.is_empty()).then(|| mean(&vals))
            })
            .collect()
    }
}

/// Cross-validate one strategy.
pub fn crossval(
    data: &Dataset,
    taxonomy: &Taxonomy,
    strategy: Strategy,
    base: &BaseConfig,
    k: usize,
    seed: u64,
) -> Result<CvReport> {
    Ok(crossval_strategies(data, taxonomy, &[strategy], base, k, seed)?.remove(0))
}

/// Cross-validate several strategies on the same folds. Each fold trains a
/// single hierarchical model (seeded with `seed + fold`) and predicts with
/// every strategy. Folds run in parallel.
pub fn crossval_strategies(
    data: &Dataset,
    taxonomy: &Taxonomy,
    strategies: &[Strategy],
    base: &BaseConfig,
    k: usize,
    seed: u64,
) -> Result<Vec<CvReport>> {
    if strategies.is_empty() {
        return Err(Error::contract("no strategies to evaluate"));
    }
    let plan = stratified_kfold(&data.labels, k, seed)?;
    let per_fold = (0..k)
        .into_par_iter()
        .map(|fold| evaluate_fold(data, taxonomy, strategies, base, &plan, fold, seed))
        .collect::<Result<Vec<_>>>()?;
    Ok(strategies
        .iter()
        .enumerate()
        .map(|(s, &strategy)| CvReport {
            strategy,
            base: base.kind(),
            folds: per_fold.iter().map(|f| f[s].clone()).collect(),
            warnings: plan.warnings.clone(),
        })
        .collect())
}

fn evaluate_fold(
    data: &Dataset,
    taxonomy: &Taxonomy,
    strategies: &[Strategy],
    base: &BaseConfig,
    plan: &FoldPlan,
    fold: usize,
    seed: u64,
) -> Result<Vec<HierMetrics>> {
    let train = data.subset(&plan.train_indices(fold));
    let test = data.subset(&plan.test_indices(fold));
    let cfg = base.with_seed(seed.wrapping_add(fold as u64));
    let model = train_hier(&train.points, &train.labels, taxonomy, &data.kmer_config, &cfg)?;
    strategies
        .iter()
        .map(|&s| {
            let predicted = model.predict_batch(s, &test.points)?;
            let pairs: Vec<_> = predicted.into_iter().zip(test.labels.iter().cloned()).collect();
            hier_metrics(&pairs, taxonomy)
        })
        .collect()
}
