//! RBF-kernel support vector machines: binary soft-margin training by SMO
//! and sigmoid (Platt) probability calibration.

mod kernel;
mod platt;
mod smo;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use kernel::{rbf_kernel, FULL_GRAM_LIMIT};
pub use platt::{platt_calibrate, platt_nll, PlattScaling};

pub(crate) use kernel::{rbf, Gram};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvmConfig {
    pub cost: f64,
    pub gamma: f64,
    pub kkt_tolerance: f64,
    /// Iteration budget, in multiples of the training-set size.
    pub max_passes: usize,
    /// Internal folds used to produce out-of-sample decision values for
    /// Platt calibration; below 2 the training decision values are used.
    pub platt_folds: usize,
    pub seed: u64,
}

impl Default for SvmConfig {
    fn default() -> Self {
        SvmConfig {
            cost: 1.0,
            gamma: 1.0,
            kkt_tolerance: 1e-3,
            max_passes: 200,
            platt_folds: 5,
            seed: 0,
        }
    }
}

impl SvmConfig {
    pub fn new(cost: f64, gamma: f64) -> Result<Self> {
        let cfg = SvmConfig {
            cost,
            gamma,
            ..SvmConfig::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.cost > 0.0 && self.cost.is_finite()) {
            return Err(Error::contract("SVM cost C must be > 0"));
        }
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(Error::contract("RBF gamma must be > 0"));
        }
        if !(self.kkt_tolerance > 0.0) {
            return Err(Error::contract("KKT tolerance must be > 0"));
        }
        if self.max_passes == 0 {
            return Err(Error::contract("max_passes must be >= 1"));
        }
        Ok(())
    }

    fn max_iterations(&self, n: usize) -> usize {
        self.max_passes.saturating_mul(n).max(10_000)
    }
}

/// Trained binary machine: `f(x) = sum_s coef_s K(sv_s, x) + bias`, where
/// `coef_s = alpha_s y_s`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinarySvmModel {
    support: Vec<Vec<f64>>,
    support_indices: Vec<usize>,
    coef: Vec<f64>,
    bias: f64,
    gamma: f64,
    platt: PlattScaling,
}

impl BinarySvmModel {
    pub fn support_vectors(&self) -> &[Vec<f64>] {
        &self.support
    }

    /// Positions of the support vectors in the training data.
    pub fn support_indices(&self) -> &[usize] {
        &self.support_indices
    }

    /// Signed dual coefficients `alpha_s y_s`.
    pub fn dual_coefficients(&self) -> &[f64] {
        &self.coef
    }

    pub fn bias(&self) -> f64 {
        self.bias
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn platt(&self) -> PlattScaling {
        self.platt
    }

    pub fn decision(&self, x: &[f64]) -> Result<f64> {
        if let Some(sv) = self.support.first() {
            if sv.len() != x.len() {
                return Err(Error::DimensionMismatch {
                    expected: sv.len(),
                    found: x.len(),
                });
            }
        }
        Ok(self
            .support
            .iter()
            .zip(&self.coef)
            .map(|(sv, c)| c * rbf(sv, x, self.gamma))
            .sum::<f64>()
            + self.bias)
    }

    /// Calibrated probability of the positive class.
    pub fn probability(&self, x: &[f64]) -> Result<f64> {
        Ok(self.platt.probability(self.decision(x)?))
    }

    /// Dual objective `sum alpha - 1/2 sum_ij alpha_i alpha_j y_i y_j K_ij`.
    pub fn dual_objective(&self) -> f64 {
        let linear: f64 = self.coef.iter().map(|c| c.abs()).sum();
        let mut quad = 0.0;
        for (i, a) in self.support.iter().enumerate() {
            for (j, b) in self.support.iter().enumerate() {
                quad += self.coef[i] * self.coef[j] * rbf(a, b, self.gamma);
            }
        }
        linear - 0.5 * quad
    }
}

/// Result of a binary fit expressed over a Gram row set.
#[derive(Debug, Clone)]
pub(crate) struct GramFit {
    pub alpha: Vec<f64>,
    pub bias: f64,
    pub platt: PlattScaling,
}

fn decision_on_gram(gram: &Gram<'_>, train: &[usize], alpha: &[f64], y: &[f64], bias: f64, target: usize) -> f64 {
    let mut f = bias;
    for (k, &s) in train.iter().enumerate() {
        if alpha[k] > 0.0 {
            f += alpha[k] * y[k] * gram.value(s, target);
        }
    }
    f
}

/// Train on the Gram rows `rows` with labels `y` (±1, aligned to `rows`),
/// then calibrate probabilities.
pub(crate) fn fit_on_gram(gram: &Gram<'_>, rows: &[usize], y: &[f64], cfg: &SvmConfig) -> Result<GramFit> {
    let n = rows.len();
    let pos = y.iter().filter(|&&v| v > 0.0).count();
    if n < 2 || pos == 0 || pos == n {
        return Err(Error::DegenerateData(
            "binary SVM needs samples of both classes".into(),
        ));
    }
    let mut source = kernel::RowSource::new(gram, rows);
    let sol = smo::solve(&mut source, y, cfg.cost, cfg.kkt_tolerance, cfg.max_iterations(n))?;

    let folds = cfg.platt_folds;
    let decisions: Vec<f64> = if folds >= 2 && n >= 2 * folds {
        cross_decisions(gram, rows, y, cfg)?
    } else {
        (0..n)
            .map(|t| decision_on_gram(gram, rows, &sol.alpha, y, sol.bias, rows[t]))
            .collect()
    };
    let platt = platt_calibrate(&decisions, y)?;
    Ok(GramFit {
        alpha: sol.alpha,
        bias: sol.bias,
        platt,
    })
}

/// Out-of-fold decision values for calibration.
fn cross_decisions(gram: &Gram<'_>, rows: &[usize], y: &[f64], cfg: &SvmConfig) -> Result<Vec<f64>> {
    let n = rows.len();
    let folds = cfg.platt_folds;
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(cfg.seed));
    let mut fold_of = vec![0; n];
    for (pos, &t) in order.iter().enumerate() {
        fold_of[t] = pos % folds;
    }

    let mut out = vec![0.0; n];
    for fold in 0..folds {
        let train: Vec<usize> = (0..n).filter(|&t| fold_of[t] != fold).collect();
        let test: Vec<usize> = (0..n).filter(|&t| fold_of[t] == fold).collect();
        let train_rows: Vec<usize> = train.iter().map(|&t| rows[t]).collect();
        let train_y: Vec<f64> = train.iter().map(|&t| y[t]).collect();
        let pos = train_y.iter().filter(|&&v| v > 0.0).count();
        if pos == 0 || pos == train.len() {
            let constant = if pos == 0 { -1.0 } else { 1.0 };
            for &t in &test {
                out[t] = constant;
            }
            continue;
        }
        let mut source = kernel::RowSource::new(gram, &train_rows);
        let sol = smo::solve(
            &mut source,
            &train_y,
            cfg.cost,
            cfg.kkt_tolerance,
            cfg.max_iterations(train.len()),
        )?;
        for &t in &test {
            out[t] = decision_on_gram(gram, &train_rows, &sol.alpha, &train_y, sol.bias, rows[t]);
        }
    }
    Ok(out)
}

fn check_points<X: AsRef<[f64]>>(points: &[X], labels: &[f64]) -> Result<usize> {
    if points.len() != labels.len() {
        return Err(Error::contract(format!(
            "{} points but {} labels",
            points.len(),
            labels.len()
        )));
    }
    let dim = points.first().map_or(0, |p| p.as_ref().len());
    for p in points {
        if p.as_ref().len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: p.as_ref().len(),
            });
        }
    }
    if labels.iter().any(|&y| y != 1.0 && y != -1.0) {
        return Err(Error::contract("binary labels must be +1 or -1"));
    }
    Ok(dim)
}

/// Train a calibrated binary RBF SVM. Labels are `+1.0` / `-1.0`.
pub fn train_binary_svm<X: AsRef<[f64]>>(points: &[X], labels: &[f64], config: &SvmConfig) -> Result<BinarySvmModel> {
    config.validate()?;
    check_points(points, labels)?;
    let refs: Vec<&[f64]> = points.iter().map(AsRef::as_ref).collect();
    let gram = Gram::new(&refs, config.gamma);
    let rows: Vec<usize> = (0..refs.len()).collect();
    let fit = fit_on_gram(&gram, &rows, labels, config)?;

    let mut model = BinarySvmModel {
        support: Vec::new(),
        support_indices: Vec::new(),
        coef: Vec::new(),
        bias: fit.bias,
        gamma: config.gamma,
        platt: fit.platt,
    };
    for (t, &a) in fit.alpha.iter().enumerate() {
        if a > 0.0 {
            model.support.push(refs[t].to_vec());
            model.support_indices.push(t);
            model.coef.push(a * labels[t]);
        }
    }
    Ok(model)
}

/// Indices of samples violating the soft-margin KKT conditions at `tol`,
/// recomputing every decision value from the model's support vectors.
pub fn kkt_violations<X: AsRef<[f64]>>(
    model: &BinarySvmModel,
    points: &[X],
    labels: &[f64],
    cost: f64,
    tol: f64,
) -> Result<Vec<usize>> {
    let mut alpha = vec![0.0; points.len()];
    for (&idx, &c) in model.support_indices.iter().zip(&model.coef) {
        alpha[idx] = c.abs();
    }
    let mut bad = Vec::new();
    for (t, p) in points.iter().enumerate() {
        let margin = labels[t] * model.decision(p.as_ref())?;
        let a = alpha[t];
        let ok = if a <= 0.0 {
            margin >= 1.0 - tol
        } else if a >= cost {
            margin <= 1.0 + tol
        } else {
            (margin - 1.0).abs() <= tol
        };
        if !ok || a < 0.0 || a > cost {
            bad.push(t);
        }
    }
    Ok(bad)
}
