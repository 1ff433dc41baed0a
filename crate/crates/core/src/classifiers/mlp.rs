//! Single-hidden-layer perceptron trained by per-sample backpropagation.
//!
//! Inputs are rescaled to [-1, 1] using the training extremes, both
//! layers use sigmoid activations, and targets are one-hot with squared
//! error. Weight initialization is the only randomness and is seeded.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::argmax_tie_lowest;

#[derive(Debug, Clone)]
pub(super) struct MlpModel {
    input_min: Vec<f64>,
    input_max: Vec<f64>,
    /// hidden_units rows of d weights plus a bias.
    w1: Vec<Vec<f64>>,
    /// n_classes rows of hidden_units weights plus a bias.
    w2: Vec<Vec<f64>>,
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

impl MlpModel {
    fn rescale(&self, row: &[f64]) -> Vec<f64> {
        row.iter()
            .zip(self.input_min.iter().zip(&self.input_max))
            .map(|(x, (lo, hi))| {
                if hi > lo {
                    2.0 * (x - lo) / (hi - lo) - 1.0
                } else {
                    0.0
                }
            })
            .collect()
    }

    fn forward(&self, scaled: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let d = scaled.len();
        let hidden: Vec<f64> = self
            .w1
            .iter()
            .map(|w| {
                sigmoid(w[..d].iter().zip(scaled).map(|(wi, xi)| wi * xi).sum::<f64>() + w[d])
            })
            .collect();
        let h = hidden.len();
        let output: Vec<f64> = self
            .w2
            .iter()
            .map(|w| {
                sigmoid(
                    w[..h].iter().zip(&hidden).map(|(wi, hi)| wi * hi).sum::<f64>() + w[h],
                )
            })
            .collect();
        (hidden, output)
    }

    pub(super) fn predict(&self, row: &[f64]) -> usize {
        let (_, output) = self.forward(&self.rescale(row));
        argmax_tie_lowest(&output)
    }
}

pub(super) fn fit(
    rows: &[Vec<f64>],
    labels: &[usize],
    n_classes: usize,
    hidden_units: usize,
    learning_rate: f64,
    epochs: usize,
    seed: u64,
) -> MlpModel {
    let d = rows[0].len();
    let mut input_min = vec![f64::INFINITY; d];
    let mut input_max = vec![f64::NEG_INFINITY; d];
    for row in rows {
        for (j, &x) in row.iter().enumerate() {
            input_min[j] = input_min[j].min(x);
            input_max[j] = input_max[j].max(x);
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut init = |cols: usize| -> Vec<f64> {
        (0..cols).map(|_| rng.gen_range(-0.5..0.5)).collect()
    };
    let w1: Vec<Vec<f64>> = (0..hidden_units).map(|_| init(d + 1)).collect();
    let w2: Vec<Vec<f64>> = (0..n_classes).map(|_| init(hidden_units + 1)).collect();
    let mut model = MlpModel { input_min, input_max, w1, w2 };

    let scaled: Vec<Vec<f64>> = rows.iter().map(|r| model.rescale(r)).collect();
    for _ in 0..epochs {
        for (row, &label) in scaled.iter().zip(labels) {
            let (hidden, output) = model.forward(row);
            let delta_out: Vec<f64> = output
                .iter()
                .enumerate()
                .map(|(c, &o)| {
                    let target = if c == label { 1.0 } else { 0.0 };
                    (o - target) * o * (1.0 - o)
                })
                .collect();
            let delta_hidden: Vec<f64> = hidden
                .iter()
                .enumerate()
                .map(|(j, &h)| {
                    let back: f64 =
                        model.w2.iter().zip(&delta_out).map(|(w, dc)| w[j] * dc).sum();
                    back * h * (1.0 - h)
                })
                .collect();
            for (w, dc) in model.w2.iter_mut().zip(&delta_out) {
                for (wi, hi) in w[..hidden_units].iter_mut().zip(&hidden) {
                    *wi -= learning_rate * dc * hi;
                }
                w[hidden_units] -= learning_rate * dc;
            }
            for (w, dj) in model.w1.iter_mut().zip(&delta_hidden) {
                for (wi, xi) in w[..d].iter_mut().zip(row) {
                    *wi -= learning_rate * dj * xi;
                }
                w[d] -= learning_rate * dj;
            }
        }
    }
    model
}
