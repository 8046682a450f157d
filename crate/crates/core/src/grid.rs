//! Cross-validated grid search over SVM cost and RBF width.

use std::io::{Read, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classifier::{BaseConfig, BaseKind};
use crate::crossval::{crossval, CvReport};
use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::folds::stratified_kfold;
use crate::hier::{train_hier, HierModel};
use crate::metrics::hier_metrics;
use crate::strategy::Strategy;
use crate::svm::SvmConfig;
use crate::taxonomy::Taxonomy;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub c_values: Vec<f64>,
    pub gamma_values: Vec<f64>,
    pub folds: usize,
    pub strategy: Strategy,
    pub seed: u64,
}

fn powers_of_two(from: i32, to: i32, step: usize) -> Vec<f64> {
    (from..=to).step_by(step).map(|e| 2f64.powi(e)).collect()
}

#[derive(Deserialize)]
struct GridFile {
    c: Vec<f64>,
    gamma: Vec<f64>,
}

impl Grid {
    /// C in 2^-5, 2^-3, ..., 2^15 and gamma in 2^-15, 2^-13, ..., 2^3.
    pub fn standard(seed: u64) -> Grid {
        Grid {
            c_values: powers_of_two(-5, 15, 2),
            gamma_values: powers_of_two(-15, 3, 2),
            folds: 10,
            strategy: Strategy::Lcpnb,
            seed,
        }
    }

    /// 3x3 lattice sized for relative-frequency k-mer features, whose
    /// pairwise squared distances are small.
    pub fn desk(seed: u64) -> Grid {
        Grid {
            c_values: vec![1.0, 8.0, 64.0],
            gamma_values: vec![4.0, 16.0, 64.0],
            folds: 10,
            strategy: Strategy::Lcpnb,
            seed,
        }
    }

    pub fn preset(name: &str, seed: u64) -> Result<Grid> {
        match name {
            "standard" | "default" => Ok(Grid::standard(seed)),
            "desk" => Ok(Grid::desk(seed)),
            other => Err(Error::contract(format!("unknown grid preset {other:?}"))),
        }
    }

    /// Read `{"c": [...], "gamma": [...]}`; other settings come from the
    /// standard grid.
    pub fn from_json<R: Read>(source: R, seed: u64) -> Result<Grid> {
        let file: GridFile = serde_json::from_reader(source)?;
        let grid = Grid {
            c_values: file.c,
            gamma_values: file.gamma,
            ..Grid::standard(seed)
        };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<()> {
        if self.c_values.is_empty() || self.gamma_values.is_empty() {
            return Err(Error::contract("grid axes must not be empty"));
        }
        let positive = |v: &f64| *v > 0.0 && v.is_finite();
        if !self.c_values.iter().all(positive) || !self.gamma_values.iter().all(positive) {
            return Err(Error::contract("grid values must be positive"));
        }
        Ok(())
    }

    /// Cells in lattice order: C outer, gamma inner.
    pub fn cells(&self) -> Vec<(f64, f64)> {
        self.c_values
            .iter()
            .flat_map(|&c| self.gamma_values.iter().map(move |&g| (c, g)))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum CellStatus {
    Ok,
    Failed(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridCell {
    pub c: f64,
    pub gamma: f64,
    pub mean_hf: Option<f64>,
    pub std_hf: Option<f64>,
    pub status: CellStatus,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridResult {
    pub cells: Vec<GridCell>,
    /// Selected `(C, gamma)`, absent when every cell failed.
    pub selected: Option<(f64, f64)>,
}

impl GridResult {
    /// Best mean hF; ties prefer smaller C, then smaller gamma.
    pub fn select(cells: &[GridCell]) -> Option<(f64, f64)> {
        cells
            .iter()
            .filter_map(|c| c.mean_hf.map(|m| (m, c.c, c.gamma)))
            .reduce(|best, x| {
                let better = x.0 > best.0 || (x.0 == best.0 && (x.1 < best.1 || (x.1 == best.1 && x.2 < best.2)));
                if better {
                    x
                } else {
                    best
                }
            })
            .map(|(_, c, g)| (c, g))
    }

    pub fn failed(&self) -> impl Iterator<Item = &GridCell> {
        self.cells.iter().filter(|c| c.status != CellStatus::Ok)
    }

    pub fn write_csv<W: Write>(&self, sink: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(sink);
        w.write_record(["C", "gamma", "mean_hF", "std_hF", "status"])?;
        let fmt = |v: Option<f64>| v.map_or_else(|| "NA".to_string(), |x| format!("{x:.6}"));
        for cell in &self.cells {
            let status = match &cell.status {
                CellStatus::Ok => "ok".to_string(),
                CellStatus::Failed(msg) => format!("failed: {msg}"),
            };
            w.write_record([cell.c.to_string(), cell.gamma.to_string(), fmt(cell.mean_hf), fmt(cell.std_hf), status])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Evaluate every cell by cross-validation on `data`. Cells that fail
/// numerically are reported, not fatal.
pub fn grid_search(data: &Dataset, taxonomy: &Taxonomy, grid: &Grid, template: &SvmConfig) -> Result<GridResult> {
    grid.validate()?;
    let cells = grid
        .cells()
        .into_par_iter()
        .map(|(c, gamma)| -> Result<GridCell> {
            let cfg = BaseConfig::Svm(SvmConfig {
                cost: c,
                gamma,
                seed: grid.seed,
                ..template.clone()
            });
            match crossval(data, taxonomy, grid.strategy, &cfg, grid.folds, grid.seed) {
                Ok(r) => Ok(GridCell {
                    c,
                    gamma,
                    mean_hf: Some(r.mean_hf()),
                    std_hf: Some(r.std_hf()),
                    status: CellStatus::Ok,
                }),
                Err(e @ (Error::Numeric(_) | Error::DegenerateData(_))) => Ok(GridCell {
                    c,
                    gamma,
                    mean_hf: None,
                    std_hf: None,
                    status: CellStatus::Failed(e.to_string()),
                }),
                Err(e) => Err(e),
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let selected = GridResult::select(&cells);
    Ok(GridResult { cells, selected })
}

/// Train on all of `data` with the selected cell.
pub fn train_final(data: &Dataset, taxonomy: &Taxonomy, result: &GridResult, template: &SvmConfig) -> Result<HierModel> {
    let (cost, gamma) = result.selected.ok_or_else(|| Error::contract("no viable cell"))?;
    let cfg = BaseConfig::Svm(SvmConfig {
        cost,
        gamma,
        ..template.clone()
    });
    train_hier(&data.points, &data.labels, taxonomy, &data.kmer_config, &cfg)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TunedCv {
    pub report: CvReport,
    /// `(C, gamma)` chosen inside each outer fold.
    pub selected: Vec<(f64, f64)>,
}

/// Outer k-fold evaluation in which every fold runs its own grid search on
/// its training part only, then trains with the winning cell and scores
/// the held-out part with `grid.strategy`. Fold `i` uses seed `seed + i`.
pub fn crossval_tuned(
    data: &Dataset,
    taxonomy: &Taxonomy,
    grid: &Grid,
    template: &SvmConfig,
    k: usize,
    seed: u64,
) -> Result<TunedCv> {
    grid.validate()?;
    let plan = stratified_kfold(&data.labels, k, seed)?;
    let folds = (0..k)
        .into_par_iter()
        .map(|fold| {
            let fold_seed = seed.wrapping_add(fold as u64);
            let train = data.subset(&plan.train_indices(fold));
            let test = data.subset(&plan.test_indices(fold));
            let inner = Grid {
                seed: fold_seed,
                ..grid.clone()
            };
            let template = SvmConfig {
                seed: fold_seed,
                ..template.clone()
            };
            let result = grid_search(&train, taxonomy, &inner, &template)?;
            let model = train_final(&train, taxonomy, &result, &template)?;
            let predicted = model.predict_batch(grid.strategy, &test.points)?;
            let pairs: Vec<_> = predicted.into_iter().zip(test.labels).collect();
            Ok((hier_metrics(&pairs, taxonomy)?, result.selected.expect("train_final succeeded")))
        })
        .collect::<Result<Vec<_>>>()?;
    let (metrics, selected) = folds.into_iter().unzip();
    Ok(TunedCv {
        report: CvReport {
            strategy: grid.strategy,
            base: BaseKind::Svm,
            folds: metrics,
            warnings: plan.warnings,
        },
        selected,
    })
}
