//! Probabilistic multiclass classifiers used at each parent node.
//!
//! SVMs are combined one-vs-rest: one calibrated binary machine per class,
//! with the per-class probabilities renormalized to sum to one. Logistic
//! regression is natively multinomial. Data containing a single class
//! yields a constant model.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::label::HierLabel;
use crate::logreg::{train_logreg, LogRegConfig, LogRegModel};
use crate::svm::{fit_on_gram, rbf, Gram, PlattScaling, SvmConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BaseKind {
    Svm,
    LogReg,
}

impl fmt::Display for BaseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BaseKind::Svm => "svm",
            BaseKind::LogReg => "logreg",
        })
    }
}

impl FromStr for BaseKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "svm" => Ok(BaseKind::Svm),
            "logreg" => Ok(BaseKind::LogReg),
            other => Err(Error::contract(format!("unknown base classifier {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum BaseConfig {
    Svm(SvmConfig),
    LogReg(LogRegConfig),
}

impl BaseConfig {
    pub fn kind(&self) -> BaseKind {
        match self {
            BaseConfig::Svm(_) => BaseKind::Svm,
            BaseConfig::LogReg(_) => BaseKind::LogReg,
        }
    }

    pub fn seed(&self) -> u64 {
        match self {
            BaseConfig::Svm(c) => c.seed,
            BaseConfig::LogReg(c) => c.seed,
        }
    }

    pub fn with_seed(&self, seed: u64) -> BaseConfig {
        let mut out = self.clone();
        match &mut out {
            BaseConfig::Svm(c) => c.seed = seed,
            BaseConfig::LogReg(c) => c.seed = seed,
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            BaseConfig::Svm(c) => c.validate(),
            BaseConfig::LogReg(c) => c.validate(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct OvrMachine {
    /// Indices into the shared support pool.
    support: Vec<u32>,
    coef: Vec<f64>,
    bias: f64,
    platt: PlattScaling,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct OvrSvm {
    gamma: f64,
    pool: Vec<Vec<f64>>,
    machines: Vec<OvrMachine>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
enum Inner {
    Constant,
    Svm(OvrSvm),
    LogReg(LogRegModel),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MulticlassModel {
    classes: Vec<HierLabel>,
    dimension: usize,
    inner: Inner,
}

fn class_seed(seed: u64, class: usize) -> u64 {
    seed ^ (class as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Fit a multiclass model; `labels[i]` is the local class of `points[i]`.
pub fn fit<X: AsRef<[f64]> + Sync>(config: &BaseConfig, points: &[X], labels: &[HierLabel]) -> Result<MulticlassModel> {
    config.validate()?;
    if points.is_empty() {
        return Err(Error::contract("cannot fit a classifier on zero samples"));
    }
    if points.len() != labels.len() {
        return Err(Error::contract("points and labels differ in length"));
    }
    let dimension = points[0].as_ref().len();
    if let Some(p) = points.iter().find(|p| p.as_ref().len() != dimension) {
        return Err(Error::DimensionMismatch {
            expected: dimension,
            found: p.as_ref().len(),
        });
    }
    let mut classes: Vec<HierLabel> = labels.to_vec();
    classes.sort();
    classes.dedup();
    if classes.len() == 1 {
        return Ok(MulticlassModel {
            classes,
            dimension,
            inner: Inner::Constant,
        });
    }
    let targets: Vec<usize> = labels
        .iter()
        .map(|l| classes.binary_search(l).expect("class present"))
        .collect();

    let inner = match config {
        BaseConfig::LogReg(cfg) => Inner::LogReg(train_logreg(points, &targets, classes.len(), cfg)?),
        BaseConfig::Svm(cfg) => Inner::Svm(fit_ovr(points, &targets, classes.len(), cfg)?),
    };
    Ok(MulticlassModel {
        classes,
        dimension,
        inner,
    })
}

fn fit_ovr<X: AsRef<[f64]> + Sync>(points: &[X], targets: &[usize], n_classes: usize, cfg: &SvmConfig) -> Result<OvrSvm> {
    let refs: Vec<&[f64]> = points.iter().map(AsRef::as_ref).collect();
    let gram = Gram::new(&refs, cfg.gamma);
    let rows: Vec<usize> = (0..refs.len()).collect();

    let fits = (0..n_classes)
        .into_par_iter()
        .map(|class| {
            let y: Vec<f64> = targets.iter().map(|&t| if t == class { 1.0 } else { -1.0 }).collect();
            let class_cfg = SvmConfig {
                seed: class_seed(cfg.seed, class),
                ..cfg.clone()
            };
            fit_on_gram(&gram, &rows, &y, &class_cfg).map(|fit| (fit, y))
        })
        .collect::<Result<Vec<_>>>()?;

    // Pool every sample that is a support vector of some machine.
    let mut in_pool = vec![u32::MAX; refs.len()];
    let mut pool = Vec::new();
    for (fit, _) in &fits {
        for (t, &a) in fit.alpha.iter().enumerate() {
            if a > 0.0 && in_pool[t] == u32::MAX {
                in_pool[t] = 0;
            }
        }
    }
    for (t, slot) in in_pool.iter_mut().enumerate() {
        if *slot == 0 {
            *slot = pool.len() as u32;
            pool.push(refs[t].to_vec());
        }
    }
    let machines = fits
        .into_iter()
        .map(|(fit, y)| {
            let mut support = Vec::new();
            let mut coef = Vec::new();
            for (t, &a) in fit.alpha.iter().enumerate() {
                if a > 0.0 {
                    support.push(in_pool[t]);
                    coef.push(a * y[t]);
                }
            }
            OvrMachine {
                support,
                coef,
                bias: fit.bias,
                platt: fit.platt,
            }
        })
        .collect();
    Ok(OvrSvm {
        gamma: cfg.gamma,
        pool,
        machines,
    })
}

impl MulticlassModel {
    /// Sorted, duplicate-free local classes; probabilities follow this order.
    pub fn classes(&self) -> &[HierLabel] {
        &self.classes
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn is_constant(&self) -> bool {
        matches!(self.inner, Inner::Constant)
    }

    pub fn predict_proba(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.dimension {
            return Err(Error::DimensionMismatch {
                expected: self.dimension,
                found: x.len(),
            });
        }
        match &self.inner {
            Inner::Constant => Ok(vec![1.0]),
            Inner::LogReg(m) => m.predict_proba(x),
            Inner::Svm(ovr) => {
                let mut kernel = vec![f64::NAN; ovr.pool.len()];
                let mut probs: Vec<f64> = ovr
                    .machines
                    .iter()
                    .map(|m| {
                        let mut f = m.bias;
                        for (&s, &c) in m.support.iter().zip(&m.coef) {
                            let k = &mut kernel[s as usize];
                            if k.is_nan() {
                                *k = rbf(&ovr.pool[s as usize], x, ovr.gamma);
                            }
                            f += c * *k;
                        }
                        m.platt.probability(f)
                    })
                    .collect();
                let total: f64 = probs.iter().sum();
                if total <= 1e-12 {
                    let u = 1.0 / probs.len() as f64;
                    probs.iter_mut().for_each(|p| *p = u);
                } else {
                    probs.iter_mut().for_each(|p| *p /= total);
                }
                Ok(probs)
            }
        }
    }

    /// Class with maximal probability; ties go to the smallest label.
    pub fn predict(&self, x: &[f64]) -> Result<&HierLabel> {
        let p = self.predict_proba(x)?;
        let mut best = 0;
        for i in 1..p.len() {
            if p[i] > p[best] {
                best = i;
            }
        }
        Ok(&self.classes[best])
    }
}
