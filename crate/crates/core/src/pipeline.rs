//! End-to-end experiments: run the raw, PCA, and attribute-cluster
//! variants of a classifier pipeline under shared fold splits, then
//! compare the variants with paired t-tests.
//!
//! The attribute-cluster variant is the interesting one: the data matrix
//! is min-max scaled, transposed so each attribute becomes a point, and
//! k-means under generalized Jaccard distance groups the attributes. The
//! label column rides along as one extra point; whichever cluster it
//! lands in is the "label cluster", and that cluster's attribute subset
//! produces the variant's headline scores.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classifiers::ClassifierSpec;
use crate::clustering::{kmeans, split_by_cluster, ClusteringError};
use crate::data::{
    load_csv, min_max_scale, transpose, DataError, LabeledDataset, MissingPolicy,
};
use crate::evaluation::{
    cross_validate, metrics_from_confusion, F1Average, FoldPreprocessor, MetricsRecord,
};
use crate::pca::PcaPreprocessor;
use crate::stats::{paired_t_test, TTestResult};

const KMEANS_MAX_ITER: usize = 100;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Clustering(#[from] ClusteringError),
    #[error("failed to write {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("report serialization failed: {0}")]
    Serialize(#[from] serde_json::Error),
}

impl PipelineError {
    /// Process exit code: 1 usage, 2 data or I/O, 3 numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Config(_) => 1,
            PipelineError::Data(_) | PipelineError::Io { .. } => 2,
            PipelineError::Clustering(_) | PipelineError::Serialize(_) => 3,
        }
    }
}

/// The three pipeline flavors an experiment can compare.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize,
)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Raw,
    Pca,
    Cluster,
}

impl Variant {
    pub fn all() -> &'static [Variant] {
        &[Variant::Raw, Variant::Pca, Variant::Cluster]
    }

    pub fn name(&self) -> &'static str {
        match self {
            Variant::Raw => "raw",
            Variant::Pca => "pca",
            Variant::Cluster => "cluster",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Variant::all()
            .iter()
            .find(|v| v.name() == s)
            .copied()
            .ok_or_else(|| format!("unknown variant {s:?} (expected raw, pca, or cluster)"))
    }
}

/// Everything needed to run one experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub input: PathBuf,
    pub label_column: String,
    /// Attribute-cluster count for the cluster variant.
    pub k: usize,
    pub classifiers: Vec<ClassifierSpec>,
    pub folds: usize,
    pub seed: u64,
    pub variants: Vec<Variant>,
    pub pca_variance: f64,
    pub f1_mode: F1Average,
    pub alpha: f64,
    pub missing_policy: MissingPolicy,
}

impl ExperimentConfig {
    /// A config with every knob at its default: all classifiers, all
    /// variants, k = 2, 10 folds, weighted F1, alpha 0.05.
    pub fn with_input(input: PathBuf, label_column: String) -> Self {
        ExperimentConfig {
            input,
            label_column,
            k: 2,
            classifiers: crate::classifiers::ClassifierKind::all()
                .iter()
                .map(|&kind| ClassifierSpec::with_defaults(kind, 0))
                .collect(),
            folds: 10,
            seed: 0,
            variants: Variant::all().to_vec(),
            pca_variance: 0.95,
            f1_mode: F1Average::Weighted,
            alpha: 0.05,
            missing_policy: MissingPolicy::Reject,
        }
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        if self.variants.is_empty() {
            return Err(PipelineError::Config("no variants requested".into()));
        }
        if self.folds < 2 {
            return Err(PipelineError::Config(format!(
                "folds must be at least 2, got {}",
                self.folds
            )));
        }
        if self.k < 1 {
            return Err(PipelineError::Config("k must be at least 1".into()));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(PipelineError::Config(format!(
                "alpha must be in (0, 1), got {}",
                self.alpha
            )));
        }
        if !(self.pca_variance > 0.0 && self.pca_variance <= 1.0) {
            return Err(PipelineError::Config(format!(
                "pca variance threshold must be in (0, 1], got {}",
                self.pca_variance
            )));
        }
        if self.classifiers.is_empty() {
            return Err(PipelineError::Config("no classifiers requested".into()));
        }
        let mut seen = Vec::new();
        for spec in &self.classifiers {
            if seen.contains(&spec.kind) {
                return Err(PipelineError::Config(format!(
                    "classifier {} listed twice",
                    spec.kind
                )));
            }
            seen.push(spec.kind);
            spec.validate()
                .map_err(|e| PipelineError::Config(e.to_string()))?;
        }
        let mut seen_variants = Vec::new();
        for v in &self.variants {
            if seen_variants.contains(v) {
                return Err(PipelineError::Config(format!("variant {v} listed twice")));
            }
            seen_variants.push(*v);
        }
        Ok(())
    }
}

/// One (variant, classifier) result: metrics, or the error that stopped it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum CellOutcome {
    Ok { metrics: MetricsRecord },
    Error { error: String },
}

impl CellOutcome {
    pub fn metrics(&self) -> Option<&MetricsRecord> {
        match self {
            CellOutcome::Ok { metrics } => Some(metrics),
            CellOutcome::Error { .. } => None,
        }
    }
}

/// One variant-pair t-test, or why it could not run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum TTestOutcome {
    Ok { test: TTestResult },
    Error { error: String },
}

/// What the attribute-clustering step found, plus per-cluster results.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterModelReport {
    pub k: usize,
    /// Cluster id the label column landed in.
    pub label_cluster: usize,
    /// Attribute name to cluster id, label excluded.
    pub attribute_clusters: BTreeMap<String, usize>,
    /// Attribute count per cluster.
    pub cluster_sizes: Vec<usize>,
    /// Clusters left with zero attributes once the label is removed.
    pub degenerate_clusters: Vec<usize>,
    /// Per cluster: classifier name to outcome on that cluster's columns.
    pub per_cluster: Vec<BTreeMap<String, CellOutcome>>,
}

/// The full comparison a run produces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub n_rows: usize,
    pub n_attributes: usize,
    pub n_classes: usize,
    pub class_names: Vec<String>,
    /// variant -> classifier name -> outcome. The cluster variant's cells
    /// are the label cluster's scores.
    pub cells: BTreeMap<Variant, BTreeMap<String, CellOutcome>>,
    pub cluster_model: Option<ClusterModelReport>,
    /// "f1:raw_vs_cluster"-style key -> paired t-test over the
    /// per-classifier metric columns of the two variants.
    pub t_tests: BTreeMap<String, TTestOutcome>,
}

fn scaled_copy(dataset: &LabeledDataset) -> LabeledDataset {
    LabeledDataset {
        matrix: min_max_scale(&dataset.matrix),
        labels: dataset.labels.clone(),
        label_name: dataset.label_name.clone(),
        class_names: dataset.class_names.clone(),
    }
}

fn evaluate_all(
    dataset: &LabeledDataset,
    config: &ExperimentConfig,
    preproc: Option<&dyn FoldPreprocessor>,
) -> BTreeMap<String, CellOutcome> {
    config
        .classifiers
        .iter()
        .map(|spec| {
            let outcome = cross_validate(dataset, spec, config.folds, config.seed, preproc)
                .and_then(|cm| metrics_from_confusion(&cm, config.f1_mode))
                .map(|metrics| CellOutcome::Ok { metrics })
                .unwrap_or_else(|e| CellOutcome::Error { error: e.to_string() });
            (spec.kind.name().to_string(), outcome)
        })
        .collect()
}

fn cluster_model_on(
    scaled: &LabeledDataset,
    config: &ExperimentConfig,
) -> Result<(ClusterModelReport, BTreeMap<String, CellOutcome>), PipelineError> {
    let n_attrs = scaled.matrix.n_cols();
    if config.k > n_attrs {
        return Err(PipelineError::Config(format!(
            "k = {} exceeds the attribute count {n_attrs}",
            config.k
        )));
    }

    // Attributes become points; the label column rides along as one more
    // point so its cluster can be identified, then gets stripped.
    let mut points = transpose(&scaled.matrix);
    let span = (scaled.n_classes().max(2) - 1) as f64;
    points
        .rows
        .push(scaled.labels.iter().map(|&l| l as f64 / span).collect());
    if let Some(names) = points.row_names.as_mut() {
        names.push(scaled.label_name.clone());
    }

    let result = kmeans(&points, config.k, config.seed, KMEANS_MAX_ITER)?;
    let label_cluster = result.assignment[n_attrs];
    let mut attr_assignment = result.clone();
    attr_assignment.assignment.truncate(n_attrs);

    let parts = split_by_cluster(scaled, &attr_assignment)?;
    let attribute_clusters: BTreeMap<String, usize> = scaled
        .matrix
        .col_names
        .iter()
        .cloned()
        .zip(attr_assignment.assignment.iter().copied())
        .collect();
    let mut cluster_sizes = vec![0usize; config.k];
    for &c in &attr_assignment.assignment {
        cluster_sizes[c] += 1;
    }

    let mut degenerate_clusters = Vec::new();
    let mut per_cluster = Vec::with_capacity(config.k);
    for (j, part) in parts.iter().enumerate() {
        if part.matrix.n_cols() == 0 {
            degenerate_clusters.push(j);
            let error = format!("cluster {j} has no attributes after label removal");
            per_cluster.push(
                config
                    .classifiers
                    .iter()
                    .map(|spec| {
                        (
                            spec.kind.name().to_string(),
                            CellOutcome::Error { error: error.clone() },
                        )
                    })
                    .collect(),
            );
        } else {
            per_cluster.push(evaluate_all(part, config, None));
        }
    }

    let headline = per_cluster[label_cluster].clone();
    let report = ClusterModelReport {
        k: config.k,
        label_cluster,
        attribute_clusters,
        cluster_sizes,
        degenerate_clusters,
        per_cluster,
    };
    Ok((report, headline))
}

/// Runs only the attribute-cluster stage: scale, transpose, cluster the
/// attributes with the label row attached, then cross-validate every
/// classifier on every cluster's column subset.
pub fn run_cluster_model(
    dataset: &LabeledDataset,
    config: &ExperimentConfig,
) -> Result<ClusterModelReport, PipelineError> {
    config.validate()?;
    let scaled = scaled_copy(dataset);
    let (report, _) = cluster_model_on(&scaled, config)?;
    Ok(report)
}

const VARIANT_PAIRS: [(Variant, Variant); 3] = [
    (Variant::Raw, Variant::Pca),
    (Variant::Raw, Variant::Cluster),
    (Variant::Pca, Variant::Cluster),
];

#[derive(Clone, Copy)]
enum MetricKind {
    F1,
    Kappa,
}

impl MetricKind {
    fn name(&self) -> &'static str {
        match self {
            MetricKind::F1 => "f1",
            MetricKind::Kappa => "kappa",
        }
    }

    fn of(&self, m: &MetricsRecord) -> f64 {
        match self {
            MetricKind::F1 => m.f1_avg,
            MetricKind::Kappa => m.kappa,
        }
    }
}

fn t_test_between(
    cells: &BTreeMap<Variant, BTreeMap<String, CellOutcome>>,
    config: &ExperimentConfig,
    a: Variant,
    b: Variant,
    metric: MetricKind,
) -> TTestOutcome {
    let mut col_a = Vec::new();
    let mut col_b = Vec::new();
    for spec in &config.classifiers {
        let name = spec.kind.name();
        let va = cells[&a].get(name).and_then(|c| c.metrics());
        let vb = cells[&b].get(name).and_then(|c| c.metrics());
        if let (Some(ma), Some(mb)) = (va, vb) {
            col_a.push(metric.of(ma));
            col_b.push(metric.of(mb));
        }
    }
    if col_a.len() < 2 {
        return TTestOutcome::Error {
            error: format!(
                "needs at least 2 paired observations, have {}",
                col_a.len()
            ),
        };
    }
    match paired_t_test(&col_a, &col_b, config.alpha) {
        Ok(test) => TTestOutcome::Ok { test },
        Err(e) => TTestOutcome::Error { error: e.to_string() },
    }
}

/// Runs every requested variant for every classifier on an in-memory
/// dataset. All variants share the same stratified fold splits (same
/// labels, same seed), so their differences are not fold noise.
pub fn run_experiment_on(
    dataset: &LabeledDataset,
    config: &ExperimentConfig,
) -> Result<ExperimentReport, PipelineError> {
    config.validate()?;
    let scaled = scaled_copy(dataset);

    let mut cells = BTreeMap::new();
    let mut cluster_model = None;
    for &variant in &config.variants {
        let variant_cells = match variant {
            Variant::Raw => evaluate_all(&scaled, config, None),
            Variant::Pca => {
                let preproc = PcaPreprocessor { variance_threshold: config.pca_variance };
                evaluate_all(&scaled, config, Some(&preproc))
            }
            Variant::Cluster => {
                let (report, headline) = cluster_model_on(&scaled, config)?;
                cluster_model = Some(report);
                headline
            }
        };
        cells.insert(variant, variant_cells);
    }

    let mut t_tests = BTreeMap::new();
    for &(a, b) in &VARIANT_PAIRS {
        if !(cells.contains_key(&a) && cells.contains_key(&b)) {
            continue;
        }
        for metric in [MetricKind::F1, MetricKind::Kappa] {
            let key = format!("{}:{}_vs_{}", metric.name(), a, b);
            t_tests.insert(key, t_test_between(&cells, config, a, b, metric));
        }
    }

    Ok(ExperimentReport {
        config: config.clone(),
        n_rows: dataset.n_rows(),
        n_attributes: dataset.matrix.n_cols(),
        n_classes: dataset.n_classes(),
        class_names: dataset.class_names.clone(),
        cells,
        cluster_model,
        t_tests,
    })
}

/// Loads the configured CSV and runs the experiment on it.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport, PipelineError> {
    config.validate()?;
    let dataset = load_csv(&config.input, &config.label_column, config.missing_policy)?;
    run_experiment_on(&dataset, config)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
}

impl FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            other => Err(format!("unknown format {other:?} (expected json or csv)")),
        }
    }
}

fn render_csv(report: &ExperimentReport) -> String {
    let variants: Vec<Variant> = Variant::all()
        .iter()
        .filter(|v| report.cells.contains_key(v))
        .copied()
        .collect();
    let mut out = String::from("classifier");
    for metric in [MetricKind::F1, MetricKind::Kappa] {
        for v in &variants {
            out.push_str(&format!(",{}_{v}", metric.name()));
        }
    }
    out.push('\n');
    for spec in &report.config.classifiers {
        let name = spec.kind.name();
        out.push_str(name);
        for metric in [MetricKind::F1, MetricKind::Kappa] {
            for v in &variants {
                out.push(',');
                if let Some(m) = report.cells[v].get(name).and_then(|c| c.metrics()) {
                    out.push_str(&format!("{}", metric.of(m)));
                }
            }
        }
        out.push('\n');
    }
    out
}

/// Serializes the report to `path`: `json` is the full nested report,
/// `csv` is a flat grid of F1 (percent) and kappa columns per variant
/// with one row per classifier.
pub fn emit_report(
    report: &ExperimentReport,
    format: ReportFormat,
    path: &Path,
) -> Result<(), PipelineError> {
    let contents = match format {
        ReportFormat::Json => {
            let mut s = serde_json::to_string_pretty(report)?;
            s.push('\n');
            s
        }
        ReportFormat::Csv => render_csv(report),
    };
    fs::write(path, contents).map_err(|source| PipelineError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Which metric column `compare` prints.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricColumn {
    F1,
    Kappa,
}

impl MetricColumn {
    fn name(&self) -> &'static str {
        match self {
            MetricColumn::F1 => "f1",
            MetricColumn::Kappa => "kappa",
        }
    }
}

impl FromStr for MetricColumn {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "f1" => Ok(MetricColumn::F1),
            "kappa" => Ok(MetricColumn::Kappa),
            other => Err(format!("unknown metric {other:?} (expected f1 or kappa)")),
        }
    }
}

/// Renders the report's t-tests for one metric in the classic paired
/// two-sample row layout.
pub fn render_compare(report: &ExperimentReport, metric: MetricColumn) -> String {
    let prefix = format!("{}:", metric.name());
    let mut out = String::new();
    let mut any = false;
    for (key, outcome) in &report.t_tests {
        let Some(pair) = key.strip_prefix(&prefix) else {
            continue;
        };
        let (a, b) = pair.split_once("_vs_").unwrap_or((pair, ""));
        any = true;
        out.push_str(&format!(
            "t-Test: Paired Two Sample for Means ({}, {a} vs {b})\n",
            metric.name()
        ));
        match outcome {
            TTestOutcome::Error { error } => {
                out.push_str(&format!("  unavailable: {error}\n\n"));
            }
            TTestOutcome::Ok { test } => {
                let line =
                    |label: &str, va: String, vb: String| format!("{label:<24}{va:>18}{vb:>18}\n");
                let num = |v: f64| format!("{v:.9}");
                out.push_str(&line("", a.to_string(), b.to_string()));
                out.push_str(&line("Mean", num(test.mean_a), num(test.mean_b)));
                out.push_str(&line("Variance", num(test.var_a), num(test.var_b)));
                out.push_str(&line(
                    "Observations",
                    test.n.to_string(),
                    test.n.to_string(),
                ));
                let pearson = match test.pearson_r {
                    Some(r) => num(r),
                    None => "undefined".to_string(),
                };
                out.push_str(&line("Pearson Correlation", pearson, String::new()));
                out.push_str(&line("df", test.df.to_string(), String::new()));
                out.push_str(&line("t Stat", num(test.t_stat), String::new()));
                out.push_str(&line("P(T<=t) one-tail", num(test.p_one_tail), String::new()));
                out.push_str(&line(
                    "t Critical one-tail",
                    num(test.t_crit_one),
                    String::new(),
                ));
                out.push_str(&line("P(T<=t) two-tail", num(test.p_two_tail), String::new()));
                out.push_str(&line(
                    "t Critical two-tail",
                    num(test.t_crit_two),
                    String::new(),
                ));
                out.push('\n');
            }
        }
    }
    if !any {
        out.push_str(&format!(
            "no t-tests for metric {} in this report\n",
            metric.name()
        ));
    }
    out
}
