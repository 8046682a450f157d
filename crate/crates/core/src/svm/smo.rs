//! Sequential minimal optimization for the soft-margin C-SVC dual
//!
//! ```text
//! min_a  1/2 a'Qa - e'a    s.t.  0 <= a_i <= C,  y'a = 0,   Q_ij = y_i y_j K_ij
//! ```
//!
//! Each step picks the maximal violating pair: `i` maximizes `-y_t G_t` over
//! the set of coefficients that may move up, `j` minimizes it over those
//! that may move down, where `G = Qa - e` is the dual gradient. The solver
//! stops once the gap `m - M` between those extremes drops below the KKT
//! tolerance. Choosing the bias inside `[M, m]` then guarantees every sample
//! meets its KKT condition within that tolerance.

use crate::error::{Error, Result};
use crate::svm::kernel::RowSource;

const TAU: f64 = 1e-12;

#[derive(Debug, Clone)]
pub(crate) struct DualSolution {
    pub alpha: Vec<f64>,
    pub bias: f64,
}

#[inline]
fn may_increase(alpha: f64, y: f64, c: f64) -> bool {
    (y > 0.0 && alpha < c) || (y < 0.0 && alpha > 0.0)
}

#[inline]
fn may_decrease(alpha: f64, y: f64, c: f64) -> bool {
    (y > 0.0 && alpha > 0.0) || (y < 0.0 && alpha < c)
}

/// Returns `(i, m, j, M)` for the maximal violating pair.
fn select_pair(alpha: &[f64], grad: &[f64], y: &[f64], c: f64) -> (Option<usize>, f64, Option<usize>, f64) {
    let mut up = None;
    let mut up_val = f64::NEG_INFINITY;
    let mut low = None;
    let mut low_val = f64::INFINITY;
    for t in 0..alpha.len() {
        let v = -y[t] * grad[t];
        if may_increase(alpha[t], y[t], c) && v > up_val {
            up_val = v;
            up = Some(t);
        }
        if may_decrease(alpha[t], y[t], c) && v < low_val {
            low_val = v;
            low = Some(t);
        }
    }
    (up, up_val, low, low_val)
}

pub(crate) fn solve(
    rows: &mut RowSource<'_, '_>,
    y: &[f64],
    c: f64,
    tol: f64,
    max_iterations: usize,
) -> Result<DualSolution> {
    let n = rows.len();
    debug_assert_eq!(n, y.len());
    let mut alpha = vec![0.0; n];
    let mut grad = vec![-1.0; n];
    let mut ki = vec![0.0; n];
    let mut kj = vec![0.0; n];
    let mut iterations = 0;

    loop {
        let (up, m, low, big_m) = select_pair(&alpha, &grad, y, c);
        let (i, j) = match (up, low) {
            (Some(i), Some(j)) if m - big_m >= tol => (i, j),
            _ => break,
        };
        if iterations >= max_iterations {
            return Err(Error::Numeric(format!(
                "SMO did not reach KKT tolerance {tol} within {max_iterations} iterations (gap {:.3e})",
                m - big_m
            )));
        }
        iterations += 1;

        rows.row_into(i, &mut ki);
        rows.row_into(j, &mut kj);
        let (yi, yj) = (y[i], y[j]);
        let qij = yi * yj * ki[j];
        let (old_i, old_j) = (alpha[i], alpha[j]);

        if yi != yj {
            let quad = (ki[i] + kj[j] + 2.0 * qij).max(TAU);
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if diff > 0.0 {
                if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if diff > 0.0 {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = c - diff;
                }
            } else if alpha[j] > c {
                alpha[j] = c;
                alpha[i] = c + diff;
            }
        } else {
            let quad = (ki[i] + kj[j] - 2.0 * qij).max(TAU);
            let delta = (grad[i] - grad[j]) / quad;
            let sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if sum > c {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = sum - c;
                }
            } else if alpha[j] < 0.0 {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if sum > c {
                if alpha[j] > c {
                    alpha[j] = c;
                    alpha[i] = sum - c;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }

        let di = (alpha[i] - old_i) * yi;
        let dj = (alpha[j] - old_j) * yj;
        for t in 0..n {
            grad[t] += y[t] * (ki[t] * di + kj[t] * dj);
        }
    }

    Ok(DualSolution {
        bias: bias(&alpha, &grad, y, c),
        alpha,
    })
}

/// Bias `b` for `f(x) = sum a_s y_s K(x_s, x) + b`. Every free vector
/// satisfies `v_t = -y_t G_t in [M, m]`, so their mean is admissible; with
/// no free vectors the midpoint of the gap is used.
fn bias(alpha: &[f64], grad: &[f64], y: &[f64], c: f64) -> f64 {
    let mut free_sum = 0.0;
    let mut free = 0usize;
    for t in 0..alpha.len() {
        if alpha[t] > 0.0 && alpha[t] < c {
            free_sum += -y[t] * grad[t];
            free += 1;
        }
    }
    if free > 0 {
        return free_sum / free as f64;
    }
    let (_, m, _, big_m) = select_pair(alpha, grad, y, c);
    match (m.is_finite(), big_m.is_finite()) {
        (true, true) => 0.5 * (m + big_m),
        (true, false) => m,
        (false, true) => big_m,
        (false, false) => 0.0,
    }
}
