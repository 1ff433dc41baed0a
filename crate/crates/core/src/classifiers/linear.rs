//! Linear scorers: perceptron, hinge-loss SVM, and softmax regression.
//!
//! All three share one model shape: a weight row per class holding `d`
//! attribute weights plus a trailing bias, scored by inner product and
//! decided by argmax.

use super::argmax_tie_lowest;

#[derive(Debug, Clone)]
pub(super) struct LinearModel {
    /// One row per class: `d` weights followed by the bias term.
    weights: Vec<Vec<f64>>,
}

impl LinearModel {
    fn score(&self, class: usize, row: &[f64]) -> f64 {
        let w = &self.weights[class];
        w[..row.len()].iter().zip(row).map(|(wi, xi)| wi * xi).sum::<f64>() + w[row.len()]
    }

    pub(super) fn predict(&self, row: &[f64]) -> usize {
        let scores: Vec<f64> = (0..self.weights.len()).map(|c| self.score(c, row)).collect();
        argmax_tie_lowest(&scores)
    }
}

/// One-vs-rest perceptron with per-sample mistake-driven updates.
pub(super) fn fit_perceptron(
    rows: &[Vec<f64>],
    labels: &[usize],
    n_classes: usize,
    learning_rate: f64,
    epochs: usize,
) -> LinearModel {
    let d = rows[0].len();
    let mut weights = vec![vec![0.0; d + 1]; n_classes];
    for _ in 0..epochs {
        for (row, &label) in rows.iter().zip(labels) {
            for (c, w) in weights.iter_mut().enumerate() {
                let y = if label == c { 1.0 } else { -1.0 };
                let score =
                    w[..d].iter().zip(row).map(|(wi, xi)| wi * xi).sum::<f64>() + w[d];
                if y * score <= 0.0 {
                    for (wi, xi) in w[..d].iter_mut().zip(row) {
                        *wi += learning_rate * y * xi;
                    }
                    w[d] += learning_rate * y;
                }
            }
        }
    }
    LinearModel { weights }
}

/// One-vs-rest linear SVM trained by full-batch subgradient descent on
/// L2-regularized hinge loss. The bias is not regularized.
pub(super) fn fit_svm(
    rows: &[Vec<f64>],
    labels: &[usize],
    n_classes: usize,
    lambda: f64,
    learning_rate: f64,
    epochs: usize,
) -> LinearModel {
    let d = rows[0].len();
    let n = rows.len() as f64;
    let mut weights = vec![vec![0.0; d + 1]; n_classes];
    let mut grad = vec![0.0; d + 1];
    for _ in 0..epochs {
        for (c, w) in weights.iter_mut().enumerate() {
            for (g, wi) in grad.iter_mut().zip(w.iter()) {
                *g = lambda * wi;
            }
            grad[d] = 0.0;
            for (row, &label) in rows.iter().zip(labels) {
                let y = if label == c { 1.0 } else { -1.0 };
                let score =
                    w[..d].iter().zip(row).map(|(wi, xi)| wi * xi).sum::<f64>() + w[d];
                if y * score < 1.0 {
                    for (g, xi) in grad[..d].iter_mut().zip(row) {
                        *g -= y * xi / n;
                    }
                    grad[d] -= y / n;
                }
            }
            for (wi, g) in w.iter_mut().zip(&grad) {
                *wi -= learning_rate * g;
            }
        }
    }
    LinearModel { weights }
}

/// Multinomial logistic regression trained by full-batch gradient descent
/// on the L2-regularized softmax cross-entropy.
pub(super) fn fit_logistic(
    rows: &[Vec<f64>],
    labels: &[usize],
    n_classes: usize,
    lambda: f64,
    learning_rate: f64,
    epochs: usize,
) -> LinearModel {
    let d = rows[0].len();
    let n = rows.len() as f64;
    let mut weights = vec![vec![0.0; d + 1]; n_classes];
    let mut grad = vec![vec![0.0; d + 1]; n_classes];
    let mut scores = vec![0.0; n_classes];
    for _ in 0..epochs {
        for (g_row, w_row) in grad.iter_mut().zip(&weights) {
            for (g, wi) in g_row.iter_mut().zip(w_row) {
                *g = lambda * wi;
            }
        }
        for (row, &label) in rows.iter().zip(labels) {
            for (c, s) in scores.iter_mut().enumerate() {
                let w = &weights[c];
                *s = w[..d].iter().zip(row).map(|(wi, xi)| wi * xi).sum::<f64>() + w[d];
            }
            let max = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let exp: Vec<f64> = scores.iter().map(|s| (s - max).exp()).collect();
            let z: f64 = exp.iter().sum();
            for (c, g_row) in grad.iter_mut().enumerate() {
                let p = exp[c] / z;
                let delta = (p - if label == c { 1.0 } else { 0.0 }) / n;
                for (g, xi) in g_row[..d].iter_mut().zip(row) {
                    *g += delta * xi;
                }
                g_row[d] += delta;
            }
        }
        for (w_row, g_row) in weights.iter_mut().zip(&grad) {
            for (wi, g) in w_row.iter_mut().zip(g_row) {
                *wi -= learning_rate * g;
            }
        }
    }
    LinearModel { weights }
}
