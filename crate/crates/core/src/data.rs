//! Dataset loading, encoding, scaling, transposition and synthesis.
//!
//! The pipeline works on a dense numeric matrix (instances x attributes) plus
//! a class vector. Categorical cells are ordinally encoded in first-seen
//! order, marks-style columns can be discretized against cut points, and
//! min-max scaling maps every column into [0,1] so the generalized Jaccard
//! similarity downstream is well defined.

use std::collections::HashMap;
use std::path::Path;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, LogNormal, StandardNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DataError {
    #[error("failed to access {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("csv error in {path}: {source}")]
    Csv {
        path: String,
        #[source]
        source: csv::Error,
    },
    #[error("label column '{0}' not found in header")]
    MissingLabelColumn(String),
    #[error("missing value at row {row}, column '{column}' (reject policy)")]
    MissingCell { row: usize, column: String },
    #[error("column '{column}' has no non-missing values to impute from")]
    EmptyColumn { column: String },
    #[error("dataset has no data rows")]
    Empty,
    #[error("dataset must contain at least 2 distinct classes, found {0}")]
    SingleClass(usize),
    #[error("unknown column '{0}' in schema")]
    UnknownColumn(String),
    #[error("bins for column '{column}' must be strictly ascending")]
    BadBins { column: String },
    #[error("schema kind 'label' names attribute column '{0}'; the label lives outside the matrix")]
    LabelInMatrix(String),
    #[error("imbalance must lie strictly between 0 and 1, got {0}")]
    BadImbalance(f64),
    #[error("n_groups must be at least 1")]
    NoGroups,
}

/// How a column is treated during schema-driven preparation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AttributeKind {
    Numeric,
    Categorical,
    Label,
    Excluded,
}

/// Per-column preparation rule: an optional list of ascending cut points
/// turns a numeric column into bin indices, and `Excluded` drops the column.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AttributeSchema {
    pub name: String,
    pub kind: AttributeKind,
    pub bins: Vec<f64>,
}

/// Dense row-major numeric table with named columns.
///
/// After [`transpose`] the original column names ride along as `row_names`
/// so attribute-to-cluster maps can be reported by name.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DataMatrix {
    pub col_names: Vec<String>,
    pub row_names: Option<Vec<String>>,
    pub rows: Vec<Vec<f64>>,
}

impl DataMatrix {
    pub fn new(col_names: Vec<String>, rows: Vec<Vec<f64>>) -> Self {
        DataMatrix {
            col_names,
            row_names: None,
            rows,
        }
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.col_names.len()
    }

    /// Copy of column `j` as a vector.
    pub fn column(&self, j: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r[j]).collect()
    }

    /// New matrix keeping only the given column indices, in the given order.
    pub fn select_columns(&self, indices: &[usize]) -> DataMatrix {
        DataMatrix {
            col_names: indices.iter().map(|&j| self.col_names[j].clone()).collect(),
            row_names: None,
            rows: self
                .rows
                .iter()
                .map(|r| indices.iter().map(|&j| r[j]).collect())
                .collect(),
        }
    }
}

/// A [`DataMatrix`] plus the class column extracted from it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledDataset {
    pub matrix: DataMatrix,
    /// Class id per row, indexing into `class_names`.
    pub labels: Vec<usize>,
    pub label_name: String,
    /// Class display names in first-seen order; class id = position.
    pub class_names: Vec<String>,
}

impl LabeledDataset {
    pub fn n_rows(&self) -> usize {
        self.matrix.n_rows()
    }

    pub fn n_classes(&self) -> usize {
        self.class_names.len()
    }
}

/// Missing-cell handling for [`load_csv`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MissingPolicy {
    /// Any empty cell is an error naming its row and column.
    Reject,
    /// Empty cells take the most frequent value of their column.
    ImputeMode,
}

/// Load a CSV file with a header row into a [`LabeledDataset`].
///
/// A column is numeric when every non-missing cell parses as a float;
/// otherwise it is categorical and cells get ordinal codes in first-seen
/// order. Labels are read from `label_column` and encoded the same way.
/// Row numbers in errors are 1-based data rows (the header is row 0).
pub fn load_csv(
    path: &Path,
    label_column: &str,
    missing_policy: MissingPolicy,
) -> Result<LabeledDataset, DataError> {
    let path_str = path.display().to_string();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| csv_open_error(e, &path_str))?;
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| DataError::Csv {
            path: path_str.clone(),
            source: e,
        })?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();
    let label_idx = header
        .iter()
        .position(|h| h == label_column)
        .ok_or_else(|| DataError::MissingLabelColumn(label_column.to_string()))?;

    let mut cells: Vec<Vec<String>> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| DataError::Csv {
            path: path_str.clone(),
            source: e,
        })?;
        cells.push(record.iter().map(|c| c.trim().to_string()).collect());
    }
    if cells.is_empty() {
        return Err(DataError::Empty);
    }

    let attr_indices: Vec<usize> = (0..header.len()).filter(|&j| j != label_idx).collect();
    let mut columns: Vec<Vec<f64>> = Vec::with_capacity(attr_indices.len());
    for &j in &attr_indices {
        let raw: Vec<&str> = cells.iter().map(|row| row[j].as_str()).collect();
        columns.push(encode_column(&raw, &header[j], missing_policy)?);
    }

    let label_raw: Vec<&str> = cells.iter().map(|row| row[label_idx].as_str()).collect();
    let (labels, class_names) = encode_labels(&label_raw, &header[label_idx], missing_policy)?;

    let n = cells.len();
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|i| columns.iter().map(|col| col[i]).collect())
        .collect();
    let matrix = DataMatrix::new(
        attr_indices.iter().map(|&j| header[j].clone()).collect(),
        rows,
    );
    Ok(LabeledDataset {
        matrix,
        labels,
        label_name: label_column.to_string(),
        class_names,
    })
}

fn csv_open_error(e: csv::Error, path: &str) -> DataError {
    if let csv::ErrorKind::Io(_) = e.kind() {
        match e.into_kind() {
            csv::ErrorKind::Io(io) => DataError::Io {
                path: path.to_string(),
                source: io,
            },
            _ => unreachable!(),
        }
    } else {
        DataError::Csv {
            path: path.to_string(),
            source: e,
        }
    }
}

/// Encode one attribute column: numeric if every non-missing cell parses,
/// else ordinal codes in first-seen order. Missing cells follow `policy`.
fn encode_column(
    raw: &[&str],
    name: &str,
    policy: MissingPolicy,
) -> Result<Vec<f64>, DataError> {
    for (i, cell) in raw.iter().enumerate() {
        if cell.is_empty() && policy == MissingPolicy::Reject {
            return Err(DataError::MissingCell {
                row: i + 1,
                column: name.to_string(),
            });
        }
    }
    let numeric = raw
        .iter()
        .filter(|c| !c.is_empty())
        .all(|c| c.parse::<f64>().map(|v| v.is_finite()).unwrap_or(false));

    let mut values = Vec::with_capacity(raw.len());
    if numeric {
        for cell in raw {
            values.push(if cell.is_empty() {
                f64::NAN
            } else {
                cell.parse::<f64>().unwrap()
            });
        }
    } else {
        let mut codes: HashMap<&str, f64> = HashMap::new();
        let mut next = 0.0;
        for cell in raw {
            if cell.is_empty() {
                values.push(f64::NAN);
                continue;
            }
            let code = *codes.entry(cell).or_insert_with(|| {
                let c = next;
                next += 1.0;
                c
            });
            values.push(code);
        }
    }
    impute_nans(&mut values, name)?;
    Ok(values)
}

/// Replace NaN placeholders with the column mode (most frequent value,
/// first-seen wins ties). Only reachable under `ImputeMode`.
fn impute_nans(values: &mut [f64], name: &str) -> Result<(), DataError> {
    if !values.iter().any(|v| v.is_nan()) {
        return Ok(());
    }
    let mut order: Vec<u64> = Vec::new();
    let mut counts: HashMap<u64, usize> = HashMap::new();
    for v in values.iter().filter(|v| !v.is_nan()) {
        let bits = v.to_bits();
        if !counts.contains_key(&bits) {
            order.push(bits);
        }
        *counts.entry(bits).or_insert(0) += 1;
    }
    let mode_bits = order
        .iter()
        .max_by_key(|b| counts[b])
        .copied()
        .ok_or_else(|| DataError::EmptyColumn {
            column: name.to_string(),
        })?;
    let mode = f64::from_bits(mode_bits);
    for v in values.iter_mut() {
        if v.is_nan() {
            *v = mode;
        }
    }
    Ok(())
}

fn encode_labels(
    raw: &[&str],
    name: &str,
    policy: MissingPolicy,
) -> Result<(Vec<usize>, Vec<String>), DataError> {
    let mut class_names: Vec<String> = Vec::new();
    let mut codes: HashMap<String, usize> = HashMap::new();
    let mut labels: Vec<Option<usize>> = Vec::with_capacity(raw.len());
    for (i, cell) in raw.iter().enumerate() {
        if cell.is_empty() {
            if policy == MissingPolicy::Reject {
                return Err(DataError::MissingCell {
                    row: i + 1,
                    column: name.to_string(),
                });
            }
            labels.push(None);
            continue;
        }
        let id = *codes.entry(cell.to_string()).or_insert_with(|| {
            class_names.push(cell.to_string());
            class_names.len() - 1
        });
        labels.push(Some(id));
    }
    if class_names.is_empty() {
        return Err(DataError::EmptyColumn {
            column: name.to_string(),
        });
    }
    let mut counts = vec![0usize; class_names.len()];
    for l in labels.iter().flatten() {
        counts[*l] += 1;
    }
    let mode = (0..counts.len()).max_by_key(|&c| (counts[c], usize::MAX - c)).unwrap();
    let labels: Vec<usize> = labels.into_iter().map(|l| l.unwrap_or(mode)).collect();
    if class_names.len() < 2 {
        return Err(DataError::SingleClass(class_names.len()));
    }
    Ok((labels, class_names))
}

/// Write a dataset back out as CSV (attributes first, label column last).
pub fn write_csv(dataset: &LabeledDataset, path: &Path) -> Result<(), DataError> {
    let path_str = path.display().to_string();
    let mut writer = csv::Writer::from_path(path).map_err(|e| csv_open_error(e, &path_str))?;
    let mut header: Vec<String> = dataset.matrix.col_names.clone();
    header.push(dataset.label_name.clone());
    writer.write_record(&header).map_err(|e| DataError::Csv {
        path: path_str.clone(),
        source: e,
    })?;
    for (row, &label) in dataset.matrix.rows.iter().zip(&dataset.labels) {
        let mut record: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
        record.push(dataset.class_names[label].clone());
        writer.write_record(&record).map_err(|e| DataError::Csv {
            path: path_str.clone(),
            source: e,
        })?;
    }
    writer.flush().map_err(|e| DataError::Io {
        path: path_str,
        source: e,
    })
}

/// Replace binned columns by bin indices and drop excluded columns.
///
/// Bin rule: a value lands in the index of the first cut point that is
/// greater than or equal to it (a value equal to a cut takes that cut's
/// index, i.e. the lower bin; a value above the last cut takes `bins.len()`).
/// So 72 against cuts [50, 60, 75, 90] lands in bin 2. Columns without bins
/// pass through unchanged.
pub fn discretize(
    dataset: &LabeledDataset,
    schemas: &[AttributeSchema],
) -> Result<LabeledDataset, DataError> {
    let mut out = dataset.clone();
    let mut drop: Vec<String> = Vec::new();
    for schema in schemas {
        let j = out
            .matrix
            .col_names
            .iter()
            .position(|c| *c == schema.name)
            .ok_or_else(|| DataError::UnknownColumn(schema.name.clone()))?;
        match schema.kind {
            AttributeKind::Label => return Err(DataError::LabelInMatrix(schema.name.clone())),
            AttributeKind::Excluded => {
                drop.push(schema.name.clone());
                continue;
            }
            AttributeKind::Numeric | AttributeKind::Categorical => {}
        }
        if schema.bins.is_empty() {
            continue;
        }
        if schema.bins.windows(2).any(|w| w[0] >= w[1]) {
            return Err(DataError::BadBins {
                column: schema.name.clone(),
            });
        }
        for row in out.matrix.rows.iter_mut() {
            row[j] = bin_index(row[j], &schema.bins) as f64;
        }
    }
    if !drop.is_empty() {
        let keep: Vec<usize> = (0..out.matrix.n_cols())
            .filter(|&j| !drop.contains(&out.matrix.col_names[j]))
            .collect();
        out.matrix = out.matrix.select_columns(&keep);
    }
    Ok(out)
}

fn bin_index(value: f64, bins: &[f64]) -> usize {
    bins.iter().position(|&cut| value <= cut).unwrap_or(bins.len())
}

/// Map every column affinely onto [0,1]; constant columns map to all zeros.
pub fn min_max_scale(matrix: &DataMatrix) -> DataMatrix {
    let mut out = matrix.clone();
    for j in 0..matrix.n_cols() {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for row in &matrix.rows {
            lo = lo.min(row[j]);
            hi = hi.max(row[j]);
        }
        for row in out.rows.iter_mut() {
            row[j] = if hi > lo { (row[j] - lo) / (hi - lo) } else { 0.0 };
        }
    }
    out
}

/// Transpose values; original column names become row identity metadata so
/// downstream cluster assignments can be reported by attribute name.
pub fn transpose(matrix: &DataMatrix) -> DataMatrix {
    let n = matrix.n_rows();
    let m = matrix.n_cols();
    let rows: Vec<Vec<f64>> = (0..m)
        .map(|j| (0..n).map(|i| matrix.rows[i][j]).collect())
        .collect();
    let col_names = match &matrix.row_names {
        Some(names) => names.clone(),
        None => (0..n).map(|i| format!("r{i}")).collect(),
    };
    DataMatrix {
        col_names,
        row_names: Some(matrix.col_names.clone()),
        rows,
    }
}

/// Deterministic synthetic dataset with planted attribute structure.
///
/// Each of `n_groups` groups gets one standard-normal latent factor per
/// instance; the group's attributes are noisy affine copies of it
/// (`scale in [0.5,1.5)`, `offset in [-1,1)`, gaussian noise sd 0.25).
/// Noise attributes are iid LogNormal(0,1), independent of everything.
/// The label is 1 exactly when group 0's factor exceeds the standard
/// normal quantile at `imbalance`, so class-1 prevalence is about
/// `1 - imbalance`.
pub fn generate_synthetic(
    n_instances: usize,
    n_groups: usize,
    attrs_per_group: usize,
    noise_attrs: usize,
    imbalance: f64,
    seed: u64,
) -> Result<LabeledDataset, DataError> {
    if n_groups < 1 {
        return Err(DataError::NoGroups);
    }
    if !(imbalance > 0.0 && imbalance < 1.0) {
        return Err(DataError::BadImbalance(imbalance));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_grouped = n_groups * attrs_per_group;
    let scales: Vec<f64> = (0..n_grouped).map(|_| rng.gen_range(0.5..1.5)).collect();
    let offsets: Vec<f64> = (0..n_grouped).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let latents: Vec<Vec<f64>> = (0..n_instances)
        .map(|_| (0..n_groups).map(|_| rng.sample(StandardNormal)).collect())
        .collect();

    let n_cols = n_grouped + noise_attrs;
    let mut rows = vec![vec![0.0; n_cols]; n_instances];
    for (j, (&scale, &offset)) in scales.iter().zip(&offsets).enumerate() {
        let g = j / attrs_per_group;
        for (i, row) in rows.iter_mut().enumerate() {
            let noise: f64 = rng.sample(StandardNormal);
            row[j] = scale * latents[i][g] + offset + 0.25 * noise;
        }
    }
    let lognormal = LogNormal::new(0.0, 1.0).expect("valid lognormal parameters");
    for j in 0..noise_attrs {
        for row in rows.iter_mut() {
            row[n_grouped + j] = lognormal.sample(&mut rng);
        }
    }

    let threshold = inv_norm_cdf(imbalance);
    let labels: Vec<usize> = latents
        .iter()
        .map(|z| usize::from(z[0] > threshold))
        .collect();
    let distinct = labels.contains(&1) as usize + labels.contains(&0) as usize;
    if distinct < 2 {
        return Err(DataError::SingleClass(distinct));
    }

    let mut col_names = Vec::with_capacity(n_cols);
    for g in 0..n_groups {
        for a in 0..attrs_per_group {
            col_names.push(format!("g{g}_a{a}"));
        }
    }
    for j in 0..noise_attrs {
        col_names.push(format!("noise{j}"));
    }
    Ok(LabeledDataset {
        matrix: DataMatrix::new(col_names, rows),
        labels,
        label_name: "class".to_string(),
        class_names: vec!["0".to_string(), "1".to_string()],
    })
}

/// Standard normal quantile function (Acklam's rational approximation,
/// relative error below 1.2e-9 across (0,1)).
fn inv_norm_cdf(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.38357751867269e+02,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    const P_LOW: f64 = 0.02425;

    if p <= 0.0 {
        return f64::NEG_INFINITY;
    }
    if p >= 1.0 {
        return f64::INFINITY;
    }
    if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        let q = (-2.0 * (1.0 - p).ln()).sqrt();
        -(((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    }
}
