//! Naive Bayes with per-attribute Gaussian kernel density estimates.

use super::argmax_tie_lowest;

const SQRT_2PI: f64 = 2.5066282746310002;

#[derive(Debug, Clone)]
struct AttributeDensity {
    values: Vec<f64>,
    bandwidth: f64,
}

#[derive(Debug, Clone)]
struct ClassDensity {
    log_prior: f64,
    attributes: Vec<AttributeDensity>,
}

#[derive(Debug, Clone)]
pub(super) struct BayesModel {
    classes: Vec<Option<ClassDensity>>,
}

fn sample_std(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let n = values.len() as f64;
    let mean: f64 = values.iter().sum::<f64>() / n;
    let var: f64 = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    var.sqrt()
}

pub(super) fn fit(rows: &[Vec<f64>], labels: &[usize], n_classes: usize) -> BayesModel {
    let n = rows.len();
    let d = rows[0].len();
    let global_std: Vec<f64> = (0..d)
        .map(|j| sample_std(&rows.iter().map(|r| r[j]).collect::<Vec<f64>>()))
        .collect();

    let classes = (0..n_classes)
        .map(|c| {
            let members: Vec<&Vec<f64>> = rows
                .iter()
                .zip(labels)
                .filter(|(_, &l)| l == c)
                .map(|(r, _)| r)
                .collect();
            if members.is_empty() {
                return None;
            }
            let m = members.len() as f64;
            let attributes = (0..d)
                .map(|j| {
                    let values: Vec<f64> = members.iter().map(|r| r[j]).collect();
                    // Silverman's rule, falling back to the dataset-wide
                    // spread when the class values are constant.
                    let mut spread = sample_std(&values);
                    if spread == 0.0 {
                        spread = global_std[j];
                    }
                    if spread == 0.0 {
                        spread = 1e-6;
                    }
                    let bandwidth = (1.06 * spread * m.powf(-0.2)).max(1e-9);
                    AttributeDensity { values, bandwidth }
                })
                .collect();
            Some(ClassDensity { log_prior: (m / n as f64).ln(), attributes })
        })
        .collect();

    BayesModel { classes }
}

impl BayesModel {
    pub(super) fn predict(&self, row: &[f64]) -> usize {
        let scores: Vec<f64> = self
            .classes
            .iter()
            .map(|class| match class {
                None => f64::NEG_INFINITY,
                Some(class) => {
                    let mut score = class.log_prior;
                    for (x, attr) in row.iter().zip(&class.attributes) {
                        let h = attr.bandwidth;
                        let density: f64 = attr
                            .values
                            .iter()
                            .map(|v| {
                                let z = (x - v) / h;
                                (-0.5 * z * z).exp() / (h * SQRT_2PI)
                            })
                            .sum::<f64>()
                            / attr.values.len() as f64;
                        score += density.max(1e-300).ln();
                    }
                    score
                }
            })
            .collect();
        argmax_tie_lowest(&scores)
    }
}
