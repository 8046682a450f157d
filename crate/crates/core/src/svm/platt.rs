//! Sigmoid calibration of decision values.
//!
//! Fits `P(y = 1 | f) = 1 / (1 + exp(A f + B))` by regularized maximum
//! likelihood: targets are smoothed to `(N+ + 1) / (N+ + 2)` for positives and
//! `1 / (N- + 2)` for negatives, and the 2-parameter problem is solved by
//! Newton's method with backtracking (Lin, Lin & Weng's formulation).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlattScaling {
    pub a: f64,
    pub b: f64,
}

impl PlattScaling {
    pub fn probability(&self, decision: f64) -> f64 {
        let z = self.a * decision + self.b;
        if z >= 0.0 {
            let e = (-z).exp();
            e / (1.0 + e)
        } else {
            1.0 / (1.0 + z.exp())
        }
    }
}

/// Negative log-likelihood of the smoothed targets under `(a, b)`.
pub fn platt_nll(decision_values: &[f64], labels: &[f64], a: f64, b: f64) -> f64 {
    let (pos, neg) = class_counts(labels);
    let hi = (pos + 1.0) / (pos + 2.0);
    let lo = 1.0 / (neg + 2.0);
    decision_values
        .iter()
        .zip(labels)
        .map(|(&f, &y)| {
            let t = if y > 0.0 { hi } else { lo };
            let z = a * f + b;
            // -(t log p + (1-t) log(1-p)) with p = 1/(1+e^z)
            if z >= 0.0 {
                t * z + (1.0 + (-z).exp()).ln()
            } else {
                (t - 1.0) * z + (1.0 + z.exp()).ln()
            }
        })
        .sum()
}

fn class_counts(labels: &[f64]) -> (f64, f64) {
    let pos = labels.iter().filter(|&&y| y > 0.0).count() as f64;
    (pos, labels.len() as f64 - pos)
}

pub fn platt_calibrate(decision_values: &[f64], labels: &[f64]) -> Result<PlattScaling> {
    if decision_values.len() != labels.len() {
        return Err(Error::DimensionMismatch {
            expected: decision_values.len(),
            found: labels.len(),
        });
    }
    let (pos, neg) = class_counts(labels);
    if pos == 0.0 || neg == 0.0 {
        return Err(Error::DegenerateData(
            "Platt calibration needs both classes".into(),
        ));
    }

    const MAX_ITER: usize = 100;
    const MIN_STEP: f64 = 1e-10;
    const SIGMA: f64 = 1e-12;
    const EPS: f64 = 1e-5;

    let hi = (pos + 1.0) / (pos + 2.0);
    let lo = 1.0 / (neg + 2.0);
    let targets: Vec<f64> = labels.iter().map(|&y| if y > 0.0 { hi } else { lo }).collect();

    let mut a = 0.0;
    let mut b = ((neg + 1.0) / (pos + 1.0)).ln();
    let mut fval = platt_nll(decision_values, labels, a, b);

    for _ in 0..MAX_ITER {
        let (mut h11, mut h22, mut h21, mut g1, mut g2) = (SIGMA, SIGMA, 0.0, 0.0, 0.0);
        for (&f, &t) in decision_values.iter().zip(&targets) {
            let z = f * a + b;
            let (p, q) = if z >= 0.0 {
                let e = (-z).exp();
                (e / (1.0 + e), 1.0 / (1.0 + e))
            } else {
                let e = z.exp();
                (1.0 / (1.0 + e), e / (1.0 + e))
            };
            let d2 = p * q;
            h11 += f * f * d2;
            h22 += d2;
            h21 += f * d2;
            let d1 = t - p;
            g1 += f * d1;
            g2 += d1;
        }
        if g1.abs() < EPS && g2.abs() < EPS {
            break;
        }
        let det = h11 * h22 - h21 * h21;
        let da = -(h22 * g1 - h21 * g2) / det;
        let db = -(-h21 * g1 + h11 * g2) / det;
        let gd = g1 * da + g2 * db;

        let mut step = 1.0;
        let mut accepted = false;
        while step >= MIN_STEP {
            let (na, nb) = (a + step * da, b + step * db);
            let nf = platt_nll(decision_values, labels, na, nb);
            if nf < fval + 1e-4 * step * gd {
                a = na;
                b = nb;
                fval = nf;
                accepted = true;
                break;
            }
            step /= 2.0;
        }
        if !accepted {
            break;
        }
    }
    Ok(PlattScaling { a, b })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn monotone_on_separated_values() {
        let p = platt_calibrate(&[-2.0, -1.0, 1.0, 2.0], &[-1.0, -1.0, 1.0, 1.0]).unwrap();
        assert!(p.a < 0.0);
        assert!(p.probability(2.0) > p.probability(-2.0));
    }

    #[test]
    fn symmetric_data_gives_half_at_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut f = Vec::new();
        let mut y = Vec::new();
        for _ in 0..40 {
            let v: f64 = rng.gen_range(-3.0..3.0);
            let lab = if rng.gen_bool(0.7) == (v > 0.0) { 1.0 } else { -1.0 };
            f.extend([v, -v]);
            y.extend([lab, -lab]);
        }
        let p = platt_calibrate(&f, &y).unwrap();
        assert!((p.probability(0.0) - 0.5).abs() < 1e-6, "{}", p.probability(0.0));
    }

    #[test]
    fn fitted_nll_beats_random_probes() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let f: Vec<f64> = (0..60).map(|i| if i < 30 { rng.gen_range(-4.0..-0.2) } else { rng.gen_range(0.2..4.0) }).collect();
        let y: Vec<f64> = (0..60).map(|i| if i < 30 { -1.0 } else { 1.0 }).collect();
        let p = platt_calibrate(&f, &y).unwrap();
        let best = platt_nll(&f, &y, p.a, p.b);
        for _ in 0..100 {
            let a = rng.gen_range(-20.0..5.0);
            let b = rng.gen_range(-5.0..5.0);
            assert!(best <= platt_nll(&f, &y, a, b) + 1e-9);
        }
    }

    #[test]
    fn single_class_rejected() {
        assert!(platt_calibrate(&[1.0, 2.0], &[1.0, 1.0]).is_err());
    }

    #[test]
    fn probability_is_stable_at_extremes() {
        let p = PlattScaling { a: -5.0, b: 0.0 };
        assert_eq!(p.probability(1e6), 1.0);
        assert_eq!(p.probability(-1e6), 0.0);
    }
}
