//! k-means over attribute rows with generalized Jaccard distance.
//!
//! The pipeline transposes the scaled data matrix so each row is one
//! attribute's value vector, then groups correlated attributes by Lloyd
//! iterations under the distance 1 - sum(min)/sum(max). Initialization
//! samples k distinct rows without replacement; several independent
//! restarts are run from one seeded stream and the lowest-objective run
//! wins, which keeps the result deterministic per (points, k, seed).

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data::{DataMatrix, LabeledDataset};

/// Independent Lloyd runs per `kmeans` call; the best final objective wins.
pub const DEFAULT_RESTARTS: usize = 10;

const MIN_IMPROVEMENT: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum ClusteringError {
    #[error("vector lengths differ: {0} vs {1}")]
    ShapeMismatch(usize, usize),
    #[error("negative component at index {0}: Jaccard similarity needs non-negative input")]
    NegativeComponent(usize),
    #[error("k = {k} invalid for {n_rows} points (need 1 <= k <= n_rows)")]
    BadK { k: usize, n_rows: usize },
    #[error("assignment covers {got} attributes but dataset has {expected} columns")]
    AssignmentMismatch { expected: usize, got: usize },
}

/// Attribute-to-cluster map with the centroids and objective it came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterAssignment {
    pub k: usize,
    /// Cluster id per row of the clustered matrix.
    pub assignment: Vec<usize>,
    pub centroids: Vec<Vec<f64>>,
    /// Accepted Lloyd passes of the winning run.
    pub iterations: usize,
    /// Total distance of every point to its centroid.
    pub objective: f64,
    /// Objective after each accepted pass; non-increasing by construction.
    pub objective_trace: Vec<f64>,
}

/// Generalized Jaccard similarity sum(min)/sum(max) on non-negative vectors.
/// Two all-zero vectors are identical, hence similarity 1.
pub fn jaccard_similarity(x: &[f64], y: &[f64]) -> Result<f64, ClusteringError> {
    if x.len() != y.len() {
        return Err(ClusteringError::ShapeMismatch(x.len(), y.len()));
    }
    let mut min_sum = 0.0;
    let mut max_sum = 0.0;
    for (i, (&a, &b)) in x.iter().zip(y).enumerate() {
        if a < 0.0 || b < 0.0 {
            return Err(ClusteringError::NegativeComponent(i));
        }
        min_sum += a.min(b);
        max_sum += a.max(b);
    }
    if max_sum == 0.0 {
        return Ok(1.0);
    }
    Ok(min_sum / max_sum)
}

/// Distance used by k-means: 1 - similarity.
pub fn jaccard_distance(x: &[f64], y: &[f64]) -> Result<f64, ClusteringError> {
    Ok(1.0 - jaccard_similarity(x, y)?)
}

/// One assignment pass: nearest centroid per point (ties to the lowest
/// cluster id), then empty clusters are repaired by reassigning the point
/// farthest from its current centroid to the empty cluster.
fn assign_pass(
    points: &[Vec<f64>],
    centroids: &[Vec<f64>],
) -> Result<Vec<usize>, ClusteringError> {
    let k = centroids.len();
    let n = points.len();
    let mut assignment = vec![0usize; n];
    let mut dist_to_own = vec![0.0f64; n];
    for (i, p) in points.iter().enumerate() {
        let mut best = 0usize;
        let mut best_d = f64::INFINITY;
        for (j, c) in centroids.iter().enumerate() {
            let d = jaccard_distance(p, c)?;
            if d < best_d {
                best_d = d;
                best = j;
            }
        }
        assignment[i] = best;
        dist_to_own[i] = best_d;
    }
    for empty in 0..k {
        if assignment.contains(&empty) {
            continue;
        }
        let far = (0..n)
            .max_by(|&a, &b| dist_to_own[a].partial_cmp(&dist_to_own[b]).unwrap())
            .expect("at least one point");
        assignment[far] = empty;
        dist_to_own[far] = 0.0;
    }
    Ok(assignment)
}

fn component_means(points: &[Vec<f64>], assignment: &[usize], k: usize, dims: usize) -> Vec<Vec<f64>> {
    let mut sums = vec![vec![0.0; dims]; k];
    let mut counts = vec![0usize; k];
    for (p, &a) in points.iter().zip(assignment) {
        counts[a] += 1;
        for (s, &v) in sums[a].iter_mut().zip(p) {
            *s += v;
        }
    }
    for (sum, &count) in sums.iter_mut().zip(&counts) {
        if count > 0 {
            for s in sum.iter_mut() {
                *s /= count as f64;
            }
        }
    }
    sums
}

fn total_distance(
    points: &[Vec<f64>],
    assignment: &[usize],
    centroids: &[Vec<f64>],
) -> Result<f64, ClusteringError> {
    let mut total = 0.0;
    for (p, &a) in points.iter().zip(assignment) {
        total += jaccard_distance(p, &centroids[a])?;
    }
    Ok(total)
}

/// Assignment, centroids, objective, and per-iteration objective trace.
type LloydOutcome = (Vec<usize>, Vec<Vec<f64>>, f64, Vec<f64>);

/// Plain Lloyd: assign to the nearest centroid, recompute centroids as
/// component-wise member means, repeat. Each retained iteration must
/// improve the objective by [`MIN_IMPROVEMENT`]; a pass that fails to
/// (including the no-assignment-change fixed point, improvement 0) stops
/// the loop with the previous state kept, so the trace is non-increasing
/// and the final centroids are always the means of the final assignment.
fn lloyd(
    points: &[Vec<f64>],
    init: Vec<Vec<f64>>,
    max_iter: usize,
) -> Result<LloydOutcome, ClusteringError> {
    let k = init.len();
    let dims = points[0].len();
    let mut centroids = init;
    let mut state: Option<(Vec<usize>, Vec<Vec<f64>>, f64)> = None;
    let mut trace = Vec::new();
    for _ in 0..max_iter.max(1) {
        let assignment = assign_pass(points, &centroids)?;
        let means = component_means(points, &assignment, k, dims);
        let objective = total_distance(points, &assignment, &means)?;
        let improved = state
            .as_ref()
            .is_none_or(|(_, _, prev)| prev - objective >= MIN_IMPROVEMENT);
        if !improved {
            break;
        }
        trace.push(objective);
        centroids = means.clone();
        state = Some((assignment, means, objective));
    }
    let (assignment, centroids, objective) = state.expect("at least one pass runs");
    Ok((assignment, centroids, objective, trace))
}

/// Lloyd k-means under Jaccard distance on the rows of `points`.
///
/// Runs [`DEFAULT_RESTARTS`] seeded restarts and returns the one with the
/// lowest final objective. Deterministic for fixed (points, k, seed).
pub fn kmeans(
    points: &DataMatrix,
    k: usize,
    seed: u64,
    max_iter: usize,
) -> Result<ClusterAssignment, ClusteringError> {
    kmeans_with_restarts(points, k, seed, max_iter, DEFAULT_RESTARTS)
}

/// [`kmeans`] with an explicit restart budget (at least 1).
pub fn kmeans_with_restarts(
    points: &DataMatrix,
    k: usize,
    seed: u64,
    max_iter: usize,
    restarts: usize,
) -> Result<ClusterAssignment, ClusteringError> {
    let n = points.n_rows();
    if k == 0 || k > n {
        return Err(ClusteringError::BadK { k, n_rows: n });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<ClusterAssignment> = None;
    for _ in 0..restarts.max(1) {
        let chosen = rand::seq::index::sample(&mut rng, n, k);
        let init: Vec<Vec<f64>> = chosen.iter().map(|i| points.rows[i].clone()).collect();
        let (assignment, centroids, objective, trace) =
            lloyd(&points.rows, init, max_iter.max(1))?;
        let better = best
            .as_ref()
            .map(|b| objective < b.objective)
            .unwrap_or(true);
        if better {
            best = Some(ClusterAssignment {
                k,
                assignment,
                centroids,
                iterations: trace.len(),
                objective,
                objective_trace: trace,
            });
        }
    }
    Ok(best.expect("restarts >= 1"))
}

/// Slice a dataset into one dataset per cluster: dataset j keeps exactly the
/// columns assigned to cluster j (original order), and every output carries
/// the full label vector. Clusters left without columns yield empty-matrix
/// datasets for the caller to flag.
pub fn split_by_cluster(
    dataset: &LabeledDataset,
    assignment: &ClusterAssignment,
) -> Result<Vec<LabeledDataset>, ClusteringError> {
    let n_cols = dataset.matrix.n_cols();
    if assignment.assignment.len() != n_cols {
        return Err(ClusteringError::AssignmentMismatch {
            expected: n_cols,
            got: assignment.assignment.len(),
        });
    }
    let mut out = Vec::with_capacity(assignment.k);
    for cluster in 0..assignment.k {
        let cols: Vec<usize> = (0..n_cols)
            .filter(|&j| assignment.assignment[j] == cluster)
            .collect();
        out.push(LabeledDataset {
            matrix: dataset.matrix.select_columns(&cols),
            labels: dataset.labels.clone(),
            label_name: dataset.label_name.clone(),
            class_names: dataset.class_names.clone(),
        });
    }
    Ok(out)
}
