//! Multinomial (softmax) logistic regression with L2 penalty.
//!
//! Objective: `(1/N) sum_i CE(softmax(W'x_i + b), y_i) + (l2/2) ||W||^2`, with
//! the bias left unpenalized. Training standardizes features internally
//! and runs Nesterov-accelerated gradient descent with a fixed step
//! `learning_rate / L`, where `L` bounds the gradient's Lipschitz constant,
//! restarting momentum whenever the objective increases.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogRegConfig {
    pub l2_strength: f64,
    /// Step size as a fraction of `1/L`.
    pub learning_rate: f64,
    pub momentum: bool,
    pub max_iterations: usize,
    /// Stop once the gradient's Euclidean norm falls below this.
    pub tolerance: f64,
    pub seed: u64,
}

impl Default for LogRegConfig {
    fn default() -> Self {
        LogRegConfig {
            l2_strength: 1e-4,
            learning_rate: 1.0,
            momentum: true,
            max_iterations: 500,
            tolerance: 1e-6,
            seed: 0,
        }
    }
}

impl LogRegConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.l2_strength >= 0.0) {
            return Err(Error::contract("l2_strength must be >= 0"));
        }
        if self.max_iterations == 0 {
            return Err(Error::contract("max_iterations must be >= 1"));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate <= 2.0) {
            return Err(Error::contract("learning_rate must be in (0, 2]"));
        }
        Ok(())
    }
}

/// Weights are stored feature-major: `weights[f * n_classes + k]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogRegModel {
    n_features: usize,
    n_classes: usize,
    weights: Vec<f64>,
    bias: Vec<f64>,
    mean: Vec<f64>,
    scale: Vec<f64>,
    iterations: usize,
}

/// Numerically stable in-place softmax.
pub fn softmax(z: &mut [f64]) {
    let max = z.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for v in z.iter_mut() {
        *v = (*v - max).exp();
        sum += *v;
    }
    for v in z.iter_mut() {
        *v /= sum;
    }
}

/// Dot product with four partial sums, in a fixed order.
fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = [0.0; 4];
    let (ca, cb) = (a.chunks_exact(4), b.chunks_exact(4));
    let tail: f64 = ca.remainder().iter().zip(cb.remainder()).map(|(x, y)| x * y).sum();
    for (x, y) in ca.zip(cb) {
        for j in 0..4 {
            acc[j] += x[j] * y[j];
        }
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

/// Class-major weights: row `c` is `weights[c * d..(c + 1) * d]`.
fn logits(weights: &[f64], bias: &[f64], x: &[f64], out: &mut [f64]) {
    let d = x.len();
    for (c, o) in out.iter_mut().enumerate() {
        *o = bias[c] + dot(&weights[c * d..(c + 1) * d], x);
    }
}

fn check_shapes<X: AsRef<[f64]>>(weights: &[f64], bias: &[f64], points: &[X], labels: &[usize]) -> Result<(usize, usize)> {
    let k = bias.len();
    if k == 0 || weights.len() % k != 0 {
        return Err(Error::contract("weight matrix and bias disagree on class count"));
    }
    let d = weights.len() / k;
    if points.len() != labels.len() || points.is_empty() {
        return Err(Error::contract("need equally many (>= 1) points and labels"));
    }
    for p in points {
        if p.as_ref().len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: p.as_ref().len(),
            });
        }
    }
    if labels.iter().any(|&y| y >= k) {
        return Err(Error::contract("label index out of range"));
    }
    Ok((d, k))
}

/// Mean cross-entropy plus `(l2/2)||W||^2`. Weights are class-major:
/// `weights[c * d + f]` links feature `f` to class `c`.
pub fn logreg_objective<X: AsRef<[f64]>>(
    weights: &[f64],
    bias: &[f64],
    points: &[X],
    labels: &[usize],
    l2_strength: f64,
) -> Result<f64> {
    check_shapes(weights, bias, points, labels)?;
    Ok(loss_and_gradient(weights, bias, points, labels, l2_strength, None))
}

/// Gradient of [`logreg_objective`]: returns `(dW, db)` with
/// `dW = (1/N) sum_i (p_i - onehot(y_i)) x_i' + l2 W` and
/// `db = (1/N) sum_i (p_i - onehot(y_i))`.
pub fn logreg_gradient<X: AsRef<[f64]>>(
    weights: &[f64],
    bias: &[f64],
    points: &[X],
    labels: &[usize],
    l2_strength: f64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let (_, k) = check_shapes(weights, bias, points, labels)?;
    let mut grad = vec![0.0; weights.len() + k];
    loss_and_gradient(weights, bias, points, labels, l2_strength, Some(&mut grad));
    let gb = grad.split_off(weights.len());
    Ok((grad, gb))
}

/// Objective, and optionally its gradient packed as `[dW | db]`, in one
/// pass over the data. Shapes are assumed valid.
fn loss_and_gradient<X: AsRef<[f64]>>(
    weights: &[f64],
    bias: &[f64],
    points: &[X],
    labels: &[usize],
    l2_strength: f64,
    mut grad: Option<&mut [f64]>,
) -> f64 {
    let k = bias.len();
    let d = weights.len() / k;
    if let Some(g) = grad.as_deref_mut() {
        g.fill(0.0);
    }
    let mut p = vec![0.0; k];
    let mut loss = 0.0;
    for (x, &y) in points.iter().zip(labels) {
        let x = x.as_ref();
        logits(weights, bias, x, &mut p);
        let max = p.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lse = max + p.iter().map(|v| (v - max).exp()).sum::<f64>().ln();
        loss += lse - p[y];
        if let Some(g) = grad.as_deref_mut() {
            for v in p.iter_mut() {
                *v = (*v - lse).exp();
            }
            p[y] -= 1.0;
            let (gw, gb) = g.split_at_mut(k * d);
            for (c, &r) in p.iter().enumerate() {
                for (gf, xf) in gw[c * d..(c + 1) * d].iter_mut().zip(x) {
                    *gf += r * xf;
                }
                gb[c] += r;
            }
        }
    }
    let n = points.len() as f64;
    if let Some(g) = grad {
        let (gw, gb) = g.split_at_mut(k * d);
        for (gf, w) in gw.iter_mut().zip(weights) {
            *gf = *gf / n + l2_strength * w;
        }
        gb.iter_mut().for_each(|v| *v /= n);
    }
    let reg: f64 = weights.iter().map(|w| w * w).sum();
    loss / n + 0.5 * l2_strength * reg
}

fn standardize<X: AsRef<[f64]>>(points: &[X], d: usize) -> (Vec<f64>, Vec<f64>, Vec<Vec<f64>>) {
    let n = points.len() as f64;
    let mut mean = vec![0.0; d];
    for p in points {
        for (m, v) in mean.iter_mut().zip(p.as_ref()) {
            *m += v;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n);
    let mut var = vec![0.0; d];
    for p in points {
        for ((s, v), m) in var.iter_mut().zip(p.as_ref()).zip(&mean) {
            *s += (v - m) * (v - m);
        }
    }
    let scale: Vec<f64> = var
        .iter()
        .map(|s| {
            let sd = (s / n).sqrt();
            if sd > 1e-12 {
                sd
            } else {
                1.0
            }
        })
        .collect();
    let scaled = points
        .iter()
        .map(|p| {
            p.as_ref()
                .iter()
                .zip(&mean)
                .zip(&scale)
                .map(|((v, m), s)| (v - m) / s)
                .collect()
        })
        .collect();
    (mean, scale, scaled)
}

/// Fit a softmax model over `n_classes` classes; `labels` are class indices.
pub fn train_logreg<X: AsRef<[f64]>>(
    points: &[X],
    labels: &[usize],
    n_classes: usize,
    config: &LogRegConfig,
) -> Result<LogRegModel> {
    config.validate()?;
    if points.is_empty() {
        return Err(Error::contract("cannot fit logistic regression on zero samples"));
    }
    if n_classes == 0 {
        return Err(Error::contract("need at least one class"));
    }
    let d = points[0].as_ref().len();
    let (mean, scale, xs) = standardize(points, d);

    let k = n_classes;
    let lipschitz = 0.5 * xs.iter().map(|x| 1.0 + x.iter().map(|v| v * v).sum::<f64>()).sum::<f64>()
        / xs.len() as f64
        + config.l2_strength;
    let step = config.learning_rate / lipschitz;

    // Parameters packed as [W | b].
    let nw = d * k;
    let mut theta = vec![0.0; nw + k];
    let mut prev = theta.clone();
    let mut lookahead = theta.clone();
    let mut grad = vec![0.0; nw + k];
    let mut t = 1.0f64;
    let mut iterations = 0;

    for iter in 0..config.max_iterations {
        iterations = iter + 1;
        let f = loss_and_gradient(&lookahead[..nw], &lookahead[nw..], &xs, labels, config.l2_strength, Some(&mut grad));
        if !f.is_finite() {
            return Err(Error::Numeric("logistic regression diverged".into()));
        }
        let gnorm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
        if gnorm < config.tolerance {
            theta.copy_from_slice(&lookahead);
            break;
        }
        prev.copy_from_slice(&theta);
        for i in 0..theta.len() {
            theta[i] = lookahead[i] - step * grad[i];
        }
        // Restart momentum when the step opposes the gradient direction.
        let uphill: f64 = grad.iter().zip(theta.iter().zip(&prev)).map(|(g, (a, b))| g * (a - b)).sum();
        if config.momentum && uphill <= 0.0 {
            let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
            let beta = (t - 1.0) / t_next;
            for i in 0..theta.len() {
                lookahead[i] = theta[i] + beta * (theta[i] - prev[i]);
            }
            t = t_next;
        } else {
            t = 1.0;
            lookahead.copy_from_slice(&theta);
        }
    }

    Ok(LogRegModel {
        n_features: d,
        n_classes: k,
        weights: theta[..nw].to_vec(),
        bias: theta[nw..].to_vec(),
        mean,
        scale,
        iterations,
    })
}

impl LogRegModel {
    pub fn n_features(&self) -> usize {
        self.n_features
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    pub fn predict_proba(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.n_features {
            return Err(Error::DimensionMismatch {
                expected: self.n_features,
                found: x.len(),
            });
        }
        let scaled: Vec<f64> = x
            .iter()
            .zip(&self.mean)
            .zip(&self.scale)
            .map(|((v, m), s)| (v - m) / s)
            .collect();
        let mut z = vec![0.0; self.n_classes];
        logits(&self.weights, &self.bias, &scaled, &mut z);
        softmax(&mut z);
        Ok(z)
    }
}
