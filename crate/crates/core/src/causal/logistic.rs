//! L2-regularized logistic regression on binary features, fitted by
//! full-batch gradient descent with Armijo backtracking.

use super::matrix::BinaryMatrix;
use crate::error::CausalError;

const ARMIJO_C: f64 = 1e-4;
const MIN_STEP: f64 = 1e-20;
const MAX_STEP: f64 = 1e6;

/// Mean logistic loss plus `(lambda/2)·‖w‖²`; the bias is not penalized.
#[derive(Debug, Clone, Copy)]
pub struct LogisticObjective<'a> {
    pub x: &'a BinaryMatrix,
    pub y: &'a [bool],
    pub lambda: f64,
}

#[inline]
fn softplus(z: f64) -> f64 {
    z.max(0.0) + (-z.abs()).exp().ln_1p()
}

#[inline]
fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

impl LogisticObjective<'_> {
    fn margins(&self, w: &[f64], b: f64) -> Vec<f64> {
        (0..self.x.rows())
            .map(|i| {
                self.x
                    .row(i)
                    .iter()
                    .zip(w)
                    .filter(|(&xi, _)| xi != 0)
                    .map(|(_, wi)| wi)
                    .sum::<f64>()
                    + b
            })
            .collect()
    }

    pub fn loss(&self, w: &[f64], b: f64) -> f64 {
        let n = self.x.rows() as f64;
        let data: f64 = self
            .margins(w, b)
            .iter()
            .zip(self.y)
            .map(|(&z, &y)| softplus(z) - if y { z } else { 0.0 })
            .sum();
        data / n + 0.5 * self.lambda * w.iter().map(|v| v * v).sum::<f64>()
    }

    /// Gradient with respect to `(w, b)`.
    pub fn gradient(&self, w: &[f64], b: f64) -> (Vec<f64>, f64) {
        let n = self.x.rows() as f64;
        let mut gw: Vec<f64> = w.iter().map(|v| self.lambda * v).collect();
        let mut gb = 0.0;
        for (i, z) in self.margins(w, b).into_iter().enumerate() {
            let r = (sigmoid(z) - if self.y[i] { 1.0 } else { 0.0 }) / n;
            gb += r;
            for (g, &xi) in gw.iter_mut().zip(self.x.row(i)) {
                if xi != 0 {
                    *g += r;
                }
            }
        }
        (gw, gb)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogisticFit {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub iterations: usize,
    /// True when the gradient infinity-norm reached `tol`.
    pub converged: bool,
    pub grad_norm: f64,
    /// Loss at the start and after every accepted step.
    pub loss_history: Vec<f64>,
}

fn inf_norm(gw: &[f64], gb: f64) -> f64 {
    gw.iter().fold(gb.abs(), |m, g| m.max(g.abs()))
}

/// Fits `y ~ sigmoid(x·w + b)`.
pub fn logistic_fit(
    x: &BinaryMatrix,
    y: &[bool],
    lambda: f64,
    tol: f64,
    max_iter: usize,
) -> Result<LogisticFit, CausalError> {
    if x.rows() == 0 || x.rows() != y.len() {
        return Err(CausalError::Empty(format!(
            "{} rows against {} labels",
            x.rows(),
            y.len()
        )));
    }
    let obj = LogisticObjective { x, y, lambda };
    let mut w = vec![0.0; x.cols()];
    let mut b = 0.0;
    let mut loss = obj.loss(&w, b);
    let mut history = vec![loss];
    let mut step: f64 = 1.0;
    let mut iterations = 0;
    let (mut gw, mut gb) = obj.gradient(&w, b);
    let mut gnorm = inf_norm(&gw, gb);

    while gnorm > tol && iterations < max_iter {
        let sq: f64 = gw.iter().map(|g| g * g).sum::<f64>() + gb * gb;
        step = (step * 2.0).min(MAX_STEP);
        let accepted = loop {
            let cw: Vec<f64> = w.iter().zip(&gw).map(|(wi, g)| wi - step * g).collect();
            let cb = b - step * gb;
            let cl = obj.loss(&cw, cb);
            if !cl.is_finite() {
                return Err(CausalError::Numerical(format!("loss became {cl}")));
            }
            if cl <= loss - ARMIJO_C * step * sq {
                break Some((cw, cb, cl));
            }
            step *= 0.5;
            if step < MIN_STEP {
                break None;
            }
        };
        let Some((cw, cb, cl)) = accepted else {
            // No descent possible at machine precision.
            break;
        };
        w = cw;
        b = cb;
        loss = cl;
        history.push(loss);
        iterations += 1;
        (gw, gb) = obj.gradient(&w, b);
        gnorm = inf_norm(&gw, gb);
        if !gnorm.is_finite() {
            return Err(CausalError::Numerical(format!("gradient became {gnorm}")));
        }
    }
    Ok(LogisticFit {
        weights: w,
        bias: b,
        iterations,
        converged: gnorm <= tol,
        grad_norm: gnorm,
        loss_history: history,
    })
}

/// Smoothed pointwise mutual information between each feature and `y`.
pub fn pmi_score(x: &BinaryMatrix, y: &[bool]) -> Vec<f64> {
    let n = x.rows() as f64;
    let y_count = y.iter().filter(|&&v| v).count() as f64;
    (0..x.cols())
        .map(|j| {
            let (mut xj, mut joint) = (0.0, 0.0);
            for (i, &yi) in y.iter().enumerate() {
                if x.get(i, j) {
                    xj += 1.0;
                    if yi {
                        joint += 1.0;
                    }
                }
            }
            ((joint + 0.5) * (n + 1.0) / ((xj + 0.5) * (y_count + 0.5))).ln()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_zero_labels() {
        let x = BinaryMatrix::from_rows(&[[true, false], [false, true], [true, true], [false, false]]);
        let y = [false; 4];
        let fit = logistic_fit(&x, &y, 1e-3, 1e-6, 500).unwrap();
        let obj = LogisticObjective { x: &x, y: &y, lambda: 1e-3 };
        let z = obj.margins(&fit.weights, fit.bias);
        assert!(z.iter().all(|&zi| sigmoid(zi) <= 0.01), "{z:?}");
        assert!(fit.bias < -4.0);
        assert!(fit.weights.iter().all(|w| w.abs() < 0.5), "{:?}", fit.weights);
    }

    #[test]
    fn loss_never_increases() {
        let x = BinaryMatrix::from_rows(&[[true, false], [true, true], [false, true], [false, false], [true, true]]);
        let y = [true, true, false, false, false];
        let fit = logistic_fit(&x, &y, 1e-3, 1e-9, 300).unwrap();
        for pair in fit.loss_history.windows(2) {
            assert!(pair[1] <= pair[0]);
        }
        assert!(fit.converged || fit.iterations == 300);
    }

    #[test]
    fn rejects_mismatched_labels() {
        let x = BinaryMatrix::zeros(3, 1);
        assert!(logistic_fit(&x, &[true], 1e-3, 1e-6, 10).is_err());
    }

    #[test]
    fn pmi_closed_forms() {
        let col: Vec<bool> = (0..100).map(|i| i % 2 == 0).collect();
        let rows: Vec<[bool; 1]> = col.iter().map(|&b| [b]).collect();
        let x = BinaryMatrix::from_rows(&rows);
        let same = pmi_score(&x, &col)[0];
        assert!((same - 2f64.ln()).abs() < 1e-12);
        let neg: Vec<bool> = col.iter().map(|b| !b).collect();
        let opposite = pmi_score(&x, &neg)[0];
        let expected = (0.5 * 101.0 / (50.5 * 50.5f64)).ln();
        assert!((opposite - expected).abs() < 1e-12);
        assert!(opposite < 0.0);
    }
}
