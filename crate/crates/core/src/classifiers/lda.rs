//! Linear discriminant analysis with a pooled, ridge-stabilized covariance.

use super::{argmax_tie_lowest, ClassifierError};
use crate::linalg::cholesky_solve;

#[derive(Debug, Clone)]
pub(super) struct LdaModel {
    /// Per class: discriminant weights, or None when the class is absent
    /// from the training set.
    discriminants: Vec<Option<(Vec<f64>, f64)>>,
}

#[allow(clippy::needless_range_loop)]
pub(super) fn fit(
    rows: &[Vec<f64>],
    labels: &[usize],
    n_classes: usize,
    ridge: f64,
) -> Result<LdaModel, ClassifierError> {
    let n = rows.len();
    let d = rows[0].len();

    let mut counts = vec![0usize; n_classes];
    let mut means = vec![vec![0.0; d]; n_classes];
    for (row, &label) in rows.iter().zip(labels) {
        counts[label] += 1;
        for (m, x) in means[label].iter_mut().zip(row) {
            *m += x;
        }
    }
    for (mean, &count) in means.iter_mut().zip(&counts) {
        if count > 0 {
            for m in mean.iter_mut() {
                *m /= count as f64;
            }
        }
    }

    let present = counts.iter().filter(|&&c| c > 0).count();
    let mut cov = vec![vec![0.0; d]; d];
    for (row, &label) in rows.iter().zip(labels) {
        let centered: Vec<f64> = row.iter().zip(&means[label]).map(|(x, m)| x - m).collect();
        for i in 0..d {
            for j in i..d {
                cov[i][j] += centered[i] * centered[j];
            }
        }
    }
    let denom = n.saturating_sub(present).max(1) as f64;
    for i in 0..d {
        for j in i..d {
            cov[i][j] /= denom;
            cov[j][i] = cov[i][j];
        }
        cov[i][i] += ridge;
    }

    let discriminants = counts
        .iter()
        .zip(&means)
        .map(|(&count, mean)| {
            if count == 0 {
                return Ok(None);
            }
            let alpha = cholesky_solve(&cov, mean).ok_or_else(|| {
                ClassifierError::Numerical(
                    "pooled covariance is singular; increase the ridge".to_string(),
                )
            })?;
            let quad: f64 = mean.iter().zip(&alpha).map(|(m, a)| m * a).sum();
            let beta = -0.5 * quad + (count as f64 / n as f64).ln();
            Ok(Some((alpha, beta)))
        })
        .collect::<Result<Vec<_>, ClassifierError>>()?;

    Ok(LdaModel { discriminants })
}

impl LdaModel {
    pub(super) fn predict(&self, row: &[f64]) -> usize {
        let scores: Vec<f64> = self
            .discriminants
            .iter()
            .map(|disc| match disc {
                None => f64::NEG_INFINITY,
                Some((alpha, beta)) => {
                    alpha.iter().zip(row).map(|(a, x)| a * x).sum::<f64>() + beta
                }
            })
            .collect();
        argmax_tie_lowest(&scores)
    }
}
