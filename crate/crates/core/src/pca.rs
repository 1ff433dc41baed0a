//! Principal component analysis over the rows of a [`DataMatrix`].
//!
//! Components come from a Jacobi eigendecomposition of the sample
//! covariance matrix. The model keeps every eigenvalue (descending) but
//! only projects onto the smallest prefix of components whose cumulative
//! variance reaches the configured threshold.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data::DataMatrix;
use crate::evaluation::{FoldPreprocessor, RowTransform};
use crate::linalg::jacobi_eigen;

#[derive(Debug, Error)]
pub enum PcaError {
    #[error("pca needs at least 2 rows, got {0}")]
    TooFewRows(usize),
    #[error("pca needs at least 1 column")]
    NoColumns,
    #[error("variance threshold must be in (0, 1], got {0}")]
    BadThreshold(f64),
}

/// A fitted PCA basis.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PcaModel {
    /// Per-column mean of the training rows.
    pub mean: Vec<f64>,
    /// All principal components, one per row, ordered by decreasing variance.
    pub components: Vec<Vec<f64>>,
    /// All eigenvalues of the covariance matrix, descending, clamped at 0.
    pub eigenvalues: Vec<f64>,
    /// Number of leading components used by [`PcaModel::project`].
    pub retained: usize,
    /// The variance fraction the retained prefix was chosen to cover.
    pub variance_threshold: f64,
}

/// Fits a PCA model on the rows of `matrix`.
///
/// `threshold` is the fraction of total variance the retained components
/// must cover, in `(0, 1]`. At least one component is always retained.
#[allow(clippy::needless_range_loop)]
pub fn fit_pca(matrix: &DataMatrix, threshold: f64) -> Result<PcaModel, PcaError> {
    if !(threshold > 0.0 && threshold <= 1.0) {
        return Err(PcaError::BadThreshold(threshold));
    }
    let n = matrix.n_rows();
    let d = matrix.n_cols();
    if n < 2 {
        return Err(PcaError::TooFewRows(n));
    }
    if d == 0 {
        return Err(PcaError::NoColumns);
    }

    let mut mean = vec![0.0; d];
    for row in &matrix.rows {
        for (m, x) in mean.iter_mut().zip(row) {
            *m += x;
        }
    }
    for m in mean.iter_mut() {
        *m /= n as f64;
    }

    let mut cov = vec![vec![0.0; d]; d];
    for row in &matrix.rows {
        let centered: Vec<f64> = row.iter().zip(&mean).map(|(x, m)| x - m).collect();
        for i in 0..d {
            for j in i..d {
                cov[i][j] += centered[i] * centered[j];
            }
        }
    }
    let denom = (n - 1) as f64;
    for i in 0..d {
        for j in i..d {
            cov[i][j] /= denom;
            cov[j][i] = cov[i][j];
        }
    }

    let (raw_values, vectors) = jacobi_eigen(&cov);
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| raw_values[b].partial_cmp(&raw_values[a]).unwrap().then(a.cmp(&b)));

    let mut eigenvalues = Vec::with_capacity(d);
    let mut components = Vec::with_capacity(d);
    for &idx in &order {
        eigenvalues.push(raw_values[idx].max(0.0));
        let mut comp: Vec<f64> = (0..d).map(|i| vectors[i][idx]).collect();
        let lead = comp
            .iter()
            .enumerate()
            .max_by(|(_, a), (_, b)| a.abs().partial_cmp(&b.abs()).unwrap())
            .map(|(i, _)| i)
            .unwrap();
        if comp[lead] < 0.0 {
            for c in comp.iter_mut() {
                *c = -*c;
            }
        }
        components.push(comp);
    }

    let total: f64 = eigenvalues.iter().sum();
    let tolerance = 1e-9 * total;
    let mut retained = eigenvalues.len();
    let mut cum = 0.0;
    for (i, ev) in eigenvalues.iter().enumerate() {
        cum += ev;
        if cum + tolerance >= threshold * total {
            retained = i + 1;
            break;
        }
    }
    retained = retained.max(1);

    Ok(PcaModel { mean, components, eigenvalues, retained, variance_threshold: threshold })
}

impl PcaModel {
    /// Projects a row onto the retained components.
    pub fn project(&self, row: &[f64]) -> Vec<f64> {
        let centered: Vec<f64> = row.iter().zip(&self.mean).map(|(x, m)| x - m).collect();
        self.components[..self.retained]
            .iter()
            .map(|comp| comp.iter().zip(&centered).map(|(c, x)| c * x).sum())
            .collect()
    }

    /// Maps a projected row back to the original space.
    pub fn reconstruct(&self, projected: &[f64]) -> Vec<f64> {
        let mut row = self.mean.clone();
        for (p, comp) in projected.iter().zip(&self.components) {
            for (r, c) in row.iter_mut().zip(comp) {
                *r += p * c;
            }
        }
        row
    }

    /// Projects every row of a matrix, keeping column metadata minimal.
    pub fn project_matrix(&self, matrix: &DataMatrix) -> DataMatrix {
        let rows: Vec<Vec<f64>> = matrix.rows.iter().map(|r| self.project(r)).collect();
        let col_names = (0..self.retained).map(|i| format!("pc{i}")).collect();
        DataMatrix { col_names, row_names: matrix.row_names.clone(), rows }
    }
}

impl RowTransform for PcaModel {
    fn apply(&self, row: &[f64]) -> Vec<f64> {
        self.project(row)
    }
}

/// Fits a fresh PCA basis on each training fold.
pub struct PcaPreprocessor {
    pub variance_threshold: f64,
}

impl FoldPreprocessor for PcaPreprocessor {
    fn fit(&self, train: &DataMatrix) -> Result<Box<dyn RowTransform>, String> {
        fit_pca(train, self.variance_threshold)
            .map(|model| Box::new(model) as Box<dyn RowTransform>)
            .map_err(|e| e.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn matrix(rows: Vec<Vec<f64>>) -> DataMatrix {
        let d = rows[0].len();
        DataMatrix {
            col_names: (0..d).map(|i| format!("c{i}")).collect(),
            row_names: None,
            rows,
        }
    }

    fn random_matrix(seed: u64, n: usize, d: usize) -> DataMatrix {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        matrix((0..n).map(|_| (0..d).map(|_| rng.gen_range(-2.0..2.0)).collect()).collect())
    }

    #[test]
    fn collinear_points_give_diagonal_component() {
        // Points on the line y = x: all variance lies along (1,1)/sqrt(2).
        let m = matrix(vec![vec![0.0, 0.0], vec![1.0, 1.0], vec![2.0, 2.0], vec![3.0, 3.0]]);
        let model = fit_pca(&m, 0.95).unwrap();
        let s = 1.0 / 2.0_f64.sqrt();
        assert!((model.components[0][0] - s).abs() < 1e-9);
        assert!((model.components[0][1] - s).abs() < 1e-9);
        assert!(model.eigenvalues[1].abs() < 1e-9);
        assert_eq!(model.retained, 1);
    }

    #[test]
    fn full_threshold_retains_covariance_rank() {
        // Three points in 4-d span a plane: rank 2.
        let m = matrix(vec![
            vec![0.0, 0.0, 0.0, 0.0],
            vec![1.0, 0.0, 1.0, 0.0],
            vec![0.0, 1.0, 0.0, 1.0],
        ]);
        let model = fit_pca(&m, 1.0).unwrap();
        assert_eq!(model.retained, 2);
    }

    #[test]
    fn eigenvalue_sum_matches_covariance_trace() {
        let m = random_matrix(7, 30, 5);
        let model = fit_pca(&m, 0.95).unwrap();
        let mut trace = 0.0;
        for j in 0..5 {
            let col: Vec<f64> = m.rows.iter().map(|r| r[j]).collect();
            let mean: f64 = col.iter().sum::<f64>() / col.len() as f64;
            trace += col.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (col.len() - 1) as f64;
        }
        let total: f64 = model.eigenvalues.iter().sum();
        assert!((total - trace).abs() < 1e-8);
    }

    #[test]
    fn components_are_orthonormal() {
        let m = random_matrix(11, 40, 6);
        let model = fit_pca(&m, 1.0).unwrap();
        for a in 0..6 {
            for b in 0..6 {
                let dot: f64 = model.components[a]
                    .iter()
                    .zip(&model.components[b])
                    .map(|(x, y)| x * y)
                    .sum();
                let expected = if a == b { 1.0 } else { 0.0 };
                assert!((dot - expected).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn projected_covariance_is_diagonal_with_eigenvalue_entries() {
        let m = random_matrix(3, 50, 4);
        let model = fit_pca(&m, 1.0).unwrap();
        let projected: Vec<Vec<f64>> = m.rows.iter().map(|r| model.project(r)).collect();
        let k = model.retained;
        let n = projected.len() as f64;
        let means: Vec<f64> = (0..k)
            .map(|j| projected.iter().map(|r| r[j]).sum::<f64>() / n)
            .collect();
        for a in 0..k {
            for b in 0..k {
                let cov: f64 = projected
                    .iter()
                    .map(|r| (r[a] - means[a]) * (r[b] - means[b]))
                    .sum::<f64>()
                    / (n - 1.0);
                let expected = if a == b { model.eigenvalues[a] } else { 0.0 };
                assert!((cov - expected).abs() < 1e-6, "cov[{a}][{b}] = {cov}");
            }
        }
    }

    #[test]
    fn full_rank_projection_reconstructs_rows() {
        let m = random_matrix(19, 25, 5);
        let model = fit_pca(&m, 1.0).unwrap();
        assert_eq!(model.retained, 5);
        for row in &m.rows {
            let back = model.reconstruct(&model.project(row));
            for (x, y) in row.iter().zip(&back) {
                assert!((x - y).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn isotropic_data_retains_most_components() {
        // Near-equal eigenvalues: a 0.95 threshold must keep nearly all axes.
        let m = random_matrix(23, 400, 5);
        let model = fit_pca(&m, 0.95).unwrap();
        assert!(model.retained >= 4, "retained {}", model.retained);
    }

    #[test]
    fn projection_drops_dimensions_below_threshold() {
        // One dominant direction plus faint noise collapses to few components.
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let rows: Vec<Vec<f64>> = (0..60)
            .map(|_| {
                let t: f64 = rng.gen_range(-3.0..3.0);
                (0..4).map(|j| t * (j as f64 + 1.0) + rng.gen_range(-0.01..0.01)).collect()
            })
            .collect();
        let model = fit_pca(&matrix(rows), 0.95).unwrap();
        assert_eq!(model.retained, 1);
    }

    #[test]
    fn rejects_single_row_and_bad_threshold() {
        let one = matrix(vec![vec![1.0, 2.0]]);
        assert!(matches!(fit_pca(&one, 0.95), Err(PcaError::TooFewRows(1))));
        let two = matrix(vec![vec![1.0, 2.0], vec![3.0, 4.0]]);
        assert!(matches!(fit_pca(&two, 0.0), Err(PcaError::BadThreshold(_))));
        assert!(matches!(fit_pca(&two, 1.5), Err(PcaError::BadThreshold(_))));
    }

    #[test]
    fn fit_is_deterministic() {
        let m = random_matrix(31, 20, 3);
        let a = fit_pca(&m, 0.95).unwrap();
        let b = fit_pca(&m, 0.95).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }
}
