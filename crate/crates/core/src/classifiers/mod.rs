//! The classifier family used by the evaluation pipeline.
//!
//! Every learner trains through the same [`train`] entry point from a
//! [`ClassifierSpec`] and predicts one class id per row. Training is
//! deterministic given that spec (including its seed) and the training set.

mod bayes;
mod knn;
mod lda;
mod linear;
mod mlp;
mod tree;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ClassifierError {
    #[error("training set is empty")]
    EmptyTrainingSet,
    #[error("training set contains a single class")]
    SingleClass,
    #[error("expected {expected} attributes, got {got}")]
    ShapeMismatch { expected: usize, got: usize },
    #[error("label {label} is out of range for {n_classes} classes")]
    LabelOutOfRange { label: usize, n_classes: usize },
    #[error("unknown hyperparameter {key:?} for {kind}")]
    UnknownHyperparameter { kind: ClassifierKind, key: String },
    #[error("hyperparameter {key:?} = {value} is invalid: {reason}")]
    BadHyperparameter { key: String, value: f64, reason: &'static str },
    #[error("numerical failure: {0}")]
    Numerical(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassifierKind {
    Knn,
    NaiveBayesKernel,
    DecisionTree,
    Perceptron,
    Mlp,
    LinearSvm,
    LogisticRegression,
    Lda,
}

impl ClassifierKind {
    pub fn all() -> &'static [ClassifierKind] {
        &[
            ClassifierKind::Knn,
            ClassifierKind::NaiveBayesKernel,
            ClassifierKind::DecisionTree,
            ClassifierKind::Perceptron,
            ClassifierKind::Mlp,
            ClassifierKind::LinearSvm,
            ClassifierKind::LogisticRegression,
            ClassifierKind::Lda,
        ]
    }

    pub fn name(&self) -> &'static str {
        match self {
            ClassifierKind::Knn => "knn",
            ClassifierKind::NaiveBayesKernel => "naive_bayes_kernel",
            ClassifierKind::DecisionTree => "decision_tree",
            ClassifierKind::Perceptron => "perceptron",
            ClassifierKind::Mlp => "mlp",
            ClassifierKind::LinearSvm => "linear_svm",
            ClassifierKind::LogisticRegression => "logistic_regression",
            ClassifierKind::Lda => "lda",
        }
    }
}

impl fmt::Display for ClassifierKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ClassifierKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ClassifierKind::all()
            .iter()
            .find(|k| k.name() == s)
            .copied()
            .ok_or_else(|| format!("unknown classifier {s:?}"))
    }
}

enum Constraint {
    /// Integer-valued and at least the given minimum.
    IntMin(f64),
    /// At least the given minimum.
    Min(f64),
    /// Strictly positive.
    Positive,
}

/// Allowed hyperparameters and their defaults, one table per kind.
fn hyperparameter_table(kind: ClassifierKind) -> &'static [(&'static str, f64, Constraint)] {
    use Constraint::*;
    match kind {
        ClassifierKind::Knn => &[("k", 5.0, IntMin(1.0))],
        ClassifierKind::NaiveBayesKernel => &[],
        ClassifierKind::DecisionTree => {
            &[("max_depth", 10.0, IntMin(0.0)), ("min_split", 2.0, IntMin(2.0))]
        }
        ClassifierKind::Perceptron => {
            &[("learning_rate", 0.1, Positive), ("epochs", 100.0, IntMin(1.0))]
        }
        ClassifierKind::Mlp => &[
            ("hidden_units", 10.0, IntMin(1.0)),
            ("learning_rate", 0.1, Positive),
            ("epochs", 100.0, IntMin(1.0)),
        ],
        ClassifierKind::LinearSvm => &[
            ("lambda", 1e-3, Min(0.0)),
            ("learning_rate", 0.1, Positive),
            ("epochs", 200.0, IntMin(1.0)),
        ],
        ClassifierKind::LogisticRegression => &[
            ("lambda", 1e-4, Min(0.0)),
            ("learning_rate", 0.5, Positive),
            ("epochs", 1000.0, IntMin(1.0)),
        ],
        ClassifierKind::Lda => &[("ridge", 1e-6, Min(0.0))],
    }
}

/// A classifier recipe: which learner, any hyperparameter overrides, and
/// the seed used where training involves randomness.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifierSpec {
    pub kind: ClassifierKind,
    #[serde(default)]
    pub hyperparameters: BTreeMap<String, f64>,
    #[serde(default)]
    pub seed: u64,
}

impl ClassifierSpec {
    /// A spec with no overrides: every hyperparameter at its default.
    pub fn with_defaults(kind: ClassifierKind, seed: u64) -> Self {
        ClassifierSpec { kind, hyperparameters: BTreeMap::new(), seed }
    }

    /// Builds a spec, rejecting unknown keys and out-of-range values.
    pub fn new(
        kind: ClassifierKind,
        hyperparameters: BTreeMap<String, f64>,
        seed: u64,
    ) -> Result<Self, ClassifierError> {
        let spec = ClassifierSpec { kind, hyperparameters, seed };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), ClassifierError> {
        let table = hyperparameter_table(self.kind);
        for (key, &value) in &self.hyperparameters {
            let Some((_, _, constraint)) = table.iter().find(|(name, _, _)| name == key) else {
                return Err(ClassifierError::UnknownHyperparameter {
                    kind: self.kind,
                    key: key.clone(),
                });
            };
            if !value.is_finite() {
                return Err(ClassifierError::BadHyperparameter {
                    key: key.clone(),
                    value,
                    reason: "must be finite",
                });
            }
            match constraint {
                Constraint::IntMin(min) => {
                    if value.fract() != 0.0 || value < *min {
                        return Err(ClassifierError::BadHyperparameter {
                            key: key.clone(),
                            value,
                            reason: "must be an integer at or above the minimum",
                        });
                    }
                }
                Constraint::Min(min) => {
                    if value < *min {
                        return Err(ClassifierError::BadHyperparameter {
                            key: key.clone(),
                            value,
                            reason: "below minimum",
                        });
                    }
                }
                Constraint::Positive => {
                    if value <= 0.0 {
                        return Err(ClassifierError::BadHyperparameter {
                            key: key.clone(),
                            value,
                            reason: "must be positive",
                        });
                    }
                }
            }
        }
        Ok(())
    }

    /// Resolved value for `key`: the override if present, else the default.
    pub fn hp(&self, key: &str) -> f64 {
        if let Some(v) = self.hyperparameters.get(key) {
            return *v;
        }
        hyperparameter_table(self.kind)
            .iter()
            .find(|(name, _, _)| *name == key)
            .map(|(_, default, _)| *default)
            .unwrap_or_else(|| panic!("no hyperparameter {key:?} for {}", self.kind))
    }

    fn hp_usize(&self, key: &str) -> usize {
        self.hp(key) as usize
    }
}

#[derive(Debug, Clone)]
enum ModelInner {
    Knn(knn::KnnModel),
    NaiveBayes(bayes::BayesModel),
    Tree(tree::TreeModel),
    Linear(linear::LinearModel),
    Mlp(mlp::MlpModel),
    Lda(lda::LdaModel),
}

/// A trained classifier ready to label rows.
#[derive(Debug, Clone)]
pub struct TrainedModel {
    kind: ClassifierKind,
    n_classes: usize,
    n_attrs: usize,
    inner: ModelInner,
}

impl TrainedModel {
    pub fn kind(&self) -> ClassifierKind {
        self.kind
    }

    pub fn n_classes(&self) -> usize {
        self.n_classes
    }

    pub fn n_attrs(&self) -> usize {
        self.n_attrs
    }

    /// Predicts a class id in `0..n_classes` for one attribute row.
    pub fn predict(&self, row: &[f64]) -> Result<usize, ClassifierError> {
        if row.len() != self.n_attrs {
            return Err(ClassifierError::ShapeMismatch {
                expected: self.n_attrs,
                got: row.len(),
            });
        }
        let class = match &self.inner {
            ModelInner::Knn(m) => m.predict(row, self.n_classes),
            ModelInner::NaiveBayes(m) => m.predict(row),
            ModelInner::Tree(m) => m.predict(row),
            ModelInner::Linear(m) => m.predict(row),
            ModelInner::Mlp(m) => m.predict(row),
            ModelInner::Lda(m) => m.predict(row),
        };
        Ok(class)
    }
}

/// Trains the classifier described by `spec` on labeled rows.
///
/// Labels are class ids in `0..n_classes`. At least two distinct classes
/// must be present. The result predicts deterministically; training with
/// the same spec and data always yields the same model.
pub fn train(
    spec: &ClassifierSpec,
    rows: &[Vec<f64>],
    labels: &[usize],
    n_classes: usize,
) -> Result<TrainedModel, ClassifierError> {
    spec.validate()?;
    if rows.is_empty() {
        return Err(ClassifierError::EmptyTrainingSet);
    }
    if rows.len() != labels.len() {
        return Err(ClassifierError::ShapeMismatch { expected: rows.len(), got: labels.len() });
    }
    let n_attrs = rows[0].len();
    for row in rows {
        if row.len() != n_attrs {
            return Err(ClassifierError::ShapeMismatch { expected: n_attrs, got: row.len() });
        }
    }
    for &label in labels {
        if label >= n_classes {
            return Err(ClassifierError::LabelOutOfRange { label, n_classes });
        }
    }
    let mut seen = vec![false; n_classes];
    for &label in labels {
        seen[label] = true;
    }
    if seen.iter().filter(|&&s| s).count() < 2 {
        return Err(ClassifierError::SingleClass);
    }

    let inner = match spec.kind {
        ClassifierKind::Knn => ModelInner::Knn(knn::fit(spec.hp_usize("k"), rows, labels)),
        ClassifierKind::NaiveBayesKernel => {
            ModelInner::NaiveBayes(bayes::fit(rows, labels, n_classes))
        }
        ClassifierKind::DecisionTree => ModelInner::Tree(tree::fit(
            rows,
            labels,
            n_classes,
            spec.hp_usize("max_depth"),
            spec.hp_usize("min_split"),
        )),
        ClassifierKind::Perceptron => ModelInner::Linear(linear::fit_perceptron(
            rows,
            labels,
            n_classes,
            spec.hp("learning_rate"),
            spec.hp_usize("epochs"),
        )),
        ClassifierKind::Mlp => ModelInner::Mlp(mlp::fit(
            rows,
            labels,
            n_classes,
            spec.hp_usize("hidden_units"),
            spec.hp("learning_rate"),
            spec.hp_usize("epochs"),
            spec.seed,
        )),
        ClassifierKind::LinearSvm => ModelInner::Linear(linear::fit_svm(
            rows,
            labels,
            n_classes,
            spec.hp("lambda"),
            spec.hp("learning_rate"),
            spec.hp_usize("epochs"),
        )),
        ClassifierKind::LogisticRegression => ModelInner::Linear(linear::fit_logistic(
            rows,
            labels,
            n_classes,
            spec.hp("lambda"),
            spec.hp("learning_rate"),
            spec.hp_usize("epochs"),
        )),
        ClassifierKind::Lda => ModelInner::Lda(lda::fit(rows, labels, n_classes, spec.hp("ridge"))?),
    };

    Ok(TrainedModel { kind: spec.kind, n_classes, n_attrs, inner })
}

/// Index of the largest score, with ties going to the lowest class id.
pub(crate) fn argmax_tie_lowest(scores: &[f64]) -> usize {
    let mut best = 0;
    for (i, &s) in scores.iter().enumerate().skip(1) {
        if s > scores[best] {
            best = i;
        }
    }
    best
}
