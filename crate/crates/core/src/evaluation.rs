//! Stratified cross-validation and confusion-matrix metrics.
//!
//! One pooled confusion matrix per run: every fold's held-out predictions
//! accumulate into the same c x c grid, and accuracy, per-class
//! precision/recall/F1 and Cohen's kappa are read off that grid.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classifiers::{self, ClassifierError, ClassifierSpec};
use crate::data::{DataMatrix, LabeledDataset};

#[derive(Debug, Error)]
pub enum EvaluationError {
    #[error("fold count {f} invalid for {n} rows (need 2 <= f <= n)")]
    FoldCount { f: usize, n: usize },
    #[error("training failed in fold {fold}: {source}")]
    TrainingFailed {
        fold: usize,
        #[source]
        source: ClassifierError,
    },
    #[error("prediction failed in fold {fold}: {source}")]
    PredictionFailed {
        fold: usize,
        #[source]
        source: ClassifierError,
    },
    #[error("preprocessing failed in fold {fold}: {message}")]
    PreprocessingFailed { fold: usize, message: String },
    #[error("confusion matrix is empty")]
    EmptyMatrix,
    #[error("kappa undefined: chance agreement is 1 (all mass in one actual-and-predicted class)")]
    UndefinedKappa,
}

/// Counts indexed as `counts[actual][predicted]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub counts: Vec<Vec<u64>>,
}

impl ConfusionMatrix {
    pub fn new(n_classes: usize) -> Self {
        ConfusionMatrix {
            counts: vec![vec![0; n_classes]; n_classes],
        }
    }

    pub fn n_classes(&self) -> usize {
        self.counts.len()
    }

    pub fn record(&mut self, actual: usize, predicted: usize) {
        self.counts[actual][predicted] += 1;
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    fn row_sum(&self, i: usize) -> u64 {
        self.counts[i].iter().sum()
    }

    fn col_sum(&self, j: usize) -> u64 {
        self.counts.iter().map(|r| r[j]).sum()
    }
}

/// Averaging mode for the dataset-level F1 number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum F1Average {
    Macro,
    Weighted,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

/// Everything read off one pooled confusion matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRecord {
    pub accuracy: f64,
    pub per_class: Vec<ClassMetrics>,
    /// Averaged F1 as a percentage in [0, 100].
    pub f1_avg: f64,
    pub f1_mode: F1Average,
    pub kappa: f64,
}

fn per_class_metrics(cm: &ConfusionMatrix) -> Vec<ClassMetrics> {
    (0..cm.n_classes())
        .map(|i| {
            let tp = cm.counts[i][i] as f64;
            let col = cm.col_sum(i) as f64;
            let row = cm.row_sum(i) as f64;
            let precision = if col > 0.0 { tp / col } else { 0.0 };
            let recall = if row > 0.0 { tp / row } else { 0.0 };
            let f1 = if precision + recall > 0.0 {
                2.0 * precision * recall / (precision + recall)
            } else {
                0.0
            };
            ClassMetrics { precision, recall, f1 }
        })
        .collect()
}

pub fn accuracy_from_confusion(cm: &ConfusionMatrix) -> Result<f64, EvaluationError> {
    let total = cm.total();
    if total == 0 {
        return Err(EvaluationError::EmptyMatrix);
    }
    let trace: u64 = (0..cm.n_classes()).map(|i| cm.counts[i][i]).sum();
    Ok(trace as f64 / total as f64)
}

/// Averaged F1 as a percentage. Weighted mode weights each class by its
/// actual support; classes with zero precision+recall contribute F1 = 0.
pub fn f1_from_confusion(cm: &ConfusionMatrix, mode: F1Average) -> Result<f64, EvaluationError> {
    let total = cm.total();
    if total == 0 {
        return Err(EvaluationError::EmptyMatrix);
    }
    let per_class = per_class_metrics(cm);
    let avg = match mode {
        F1Average::Macro => {
            per_class.iter().map(|c| c.f1).sum::<f64>() / per_class.len() as f64
        }
        F1Average::Weighted => per_class
            .iter()
            .enumerate()
            .map(|(i, c)| c.f1 * cm.row_sum(i) as f64 / total as f64)
            .sum(),
    };
    Ok(100.0 * avg)
}

/// Cohen's kappa: (P(A) - P(E)) / (1 - P(E)) with P(A) the observed
/// agreement rate and P(E) the chance agreement from the marginals.
pub fn kappa_from_confusion(cm: &ConfusionMatrix) -> Result<f64, EvaluationError> {
    let total = cm.total();
    if total == 0 {
        return Err(EvaluationError::EmptyMatrix);
    }
    let total = total as f64;
    let p_a: f64 = (0..cm.n_classes())
        .map(|i| cm.counts[i][i] as f64)
        .sum::<f64>()
        / total;
    let p_e: f64 = (0..cm.n_classes())
        .map(|i| cm.row_sum(i) as f64 * cm.col_sum(i) as f64)
        .sum::<f64>()
        / (total * total);
    if p_e >= 1.0 {
        return Err(EvaluationError::UndefinedKappa);
    }
    Ok((p_a - p_e) / (1.0 - p_e))
}

pub fn metrics_from_confusion(
    cm: &ConfusionMatrix,
    mode: F1Average,
) -> Result<MetricsRecord, EvaluationError> {
    Ok(MetricsRecord {
        accuracy: accuracy_from_confusion(cm)?,
        per_class: per_class_metrics(cm),
        f1_avg: f1_from_confusion(cm, mode)?,
        f1_mode: mode,
        kappa: kappa_from_confusion(cm)?,
    })
}

/// Partition `[0, n)` into `f` index sets whose per-class counts differ by
/// at most one: each class's indices are shuffled (seeded) and dealt
/// round-robin. Fold index sets come back sorted.
pub fn stratified_folds(
    dataset: &LabeledDataset,
    f: usize,
    seed: u64,
) -> Result<Vec<Vec<usize>>, EvaluationError> {
    let n = dataset.n_rows();
    if f < 2 || f > n {
        return Err(EvaluationError::FoldCount { f, n });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut folds: Vec<Vec<usize>> = vec![Vec::new(); f];
    for class in 0..dataset.n_classes() {
        let mut idx: Vec<usize> = (0..n).filter(|&i| dataset.labels[i] == class).collect();
        idx.shuffle(&mut rng);
        for (pos, i) in idx.into_iter().enumerate() {
            folds[pos % f].push(i);
        }
    }
    for fold in folds.iter_mut() {
        fold.sort_unstable();
    }
    Ok(folds)
}

/// A preprocessing step refit inside every fold on training rows only.
pub trait FoldPreprocessor {
    fn fit(&self, train: &DataMatrix) -> Result<Box<dyn RowTransform>, String>;
}

/// The fitted, per-fold transform applied to both training and test rows.
pub trait RowTransform {
    fn apply(&self, row: &[f64]) -> Vec<f64>;
}

/// Run f-fold stratified cross-validation for one classifier and pool all
/// held-out predictions into a single confusion matrix (total = n).
/// An optional preprocessor is fit on each fold's training rows only.
pub fn cross_validate(
    dataset: &LabeledDataset,
    spec: &ClassifierSpec,
    f: usize,
    seed: u64,
    preproc: Option<&dyn FoldPreprocessor>,
) -> Result<ConfusionMatrix, EvaluationError> {
    let folds = stratified_folds(dataset, f, seed)?;
    let mut cm = ConfusionMatrix::new(dataset.n_classes());
    let n = dataset.n_rows();
    for (fold_idx, test_idx) in folds.iter().enumerate() {
        let mut in_test = vec![false; n];
        for &i in test_idx {
            in_test[i] = true;
        }
        let train_idx: Vec<usize> = (0..n).filter(|&i| !in_test[i]).collect();
        let mut train_rows: Vec<Vec<f64>> = train_idx
            .iter()
            .map(|&i| dataset.matrix.rows[i].clone())
            .collect();
        let train_labels: Vec<usize> = train_idx.iter().map(|&i| dataset.labels[i]).collect();
        let mut test_rows: Vec<Vec<f64>> = test_idx
            .iter()
            .map(|&i| dataset.matrix.rows[i].clone())
            .collect();

        if let Some(pp) = preproc {
            let train_matrix = DataMatrix::new(
                dataset.matrix.col_names.clone(),
                train_rows,
            );
            let transform = pp.fit(&train_matrix).map_err(|message| {
                EvaluationError::PreprocessingFailed { fold: fold_idx, message }
            })?;
            train_rows = train_matrix
                .rows
                .iter()
                .map(|r| transform.apply(r))
                .collect();
            test_rows = test_rows.iter().map(|r| transform.apply(r)).collect();
        }

        let model = classifiers::train(spec, &train_rows, &train_labels, dataset.n_classes())
            .map_err(|source| EvaluationError::TrainingFailed {
                fold: fold_idx,
                source,
            })?;
        for (row, &i) in test_rows.iter().zip(test_idx) {
            let predicted = model
                .predict(row)
                .map_err(|source| EvaluationError::PredictionFailed {
                    fold: fold_idx,
                    source,
                })?;
            cm.record(dataset.labels[i], predicted);
        }
    }
    Ok(cm)
}
