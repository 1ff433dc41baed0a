//! Independent oracles for the integration suites: everything here re-derives
//! its answer from first principles (pair counting, closed forms, numerical
//! integration, exhaustive search) without touching the crate's own formulas.

#![allow(dead_code)]

use std::f64::consts::PI;

/// Adjusted Rand index between two partitions given as per-item cluster ids.
pub fn adjusted_rand_index(a: &[usize], b: &[usize]) -> f64 {
    assert_eq!(a.len(), b.len(), "partitions must label the same items");
    let ka = a.iter().max().map_or(0, |&m| m + 1);
    let kb = b.iter().max().map_or(0, |&m| m + 1);
    let mut table = vec![vec![0u64; kb]; ka];
    for (&x, &y) in a.iter().zip(b) {
        table[x][y] += 1;
    }
    let choose2 = |n: u64| (n as f64) * (n.saturating_sub(1) as f64) / 2.0;
    let sum_cells: f64 = table.iter().flatten().map(|&n| choose2(n)).sum();
    let sum_rows: f64 = table.iter().map(|r| choose2(r.iter().sum())).sum();
    let sum_cols: f64 = (0..kb)
        .map(|j| choose2(table.iter().map(|r| r[j]).sum()))
        .sum();
    let total = choose2(a.len() as u64);
    let expected = sum_rows * sum_cols / total;
    let max_index = 0.5 * (sum_rows + sum_cols);
    if (max_index - expected).abs() < 1e-15 {
        return 1.0;
    }
    (sum_cells - expected) / (max_index - expected)
}

/// Metrics recomputed by counting (actual, predicted) pairs directly,
/// with per-class F1 taken as 2tp/(2tp+fp+fn) rather than through
/// precision and recall.
pub struct PairMetrics {
    pub accuracy: f64,
    /// Percent, like the crate's convention.
    pub f1_macro: f64,
    /// Percent, weighted by actual-class support.
    pub f1_weighted: f64,
    /// None when chance agreement is 1.
    pub kappa: Option<f64>,
}

pub fn metrics_from_pairs(pairs: &[(usize, usize)], n_classes: usize) -> PairMetrics {
    let n = pairs.len() as f64;
    assert!(n > 0.0, "oracle needs at least one pair");
    let hits = pairs.iter().filter(|(a, p)| a == p).count() as f64;

    let mut f1 = vec![0.0; n_classes];
    let mut support = vec![0.0; n_classes];
    for c in 0..n_classes {
        let tp = pairs.iter().filter(|&&(a, p)| a == c && p == c).count() as f64;
        let fp = pairs.iter().filter(|&&(a, p)| a != c && p == c).count() as f64;
        let fneg = pairs.iter().filter(|&&(a, p)| a == c && p != c).count() as f64;
        support[c] = pairs.iter().filter(|&&(a, _)| a == c).count() as f64;
        let denom = 2.0 * tp + fp + fneg;
        f1[c] = if denom > 0.0 { 2.0 * tp / denom } else { 0.0 };
    }

    let p_observed = hits / n;
    let p_chance: f64 = (0..n_classes)
        .map(|c| {
            let predicted = pairs.iter().filter(|&&(_, p)| p == c).count() as f64;
            (support[c] / n) * (predicted / n)
        })
        .sum();

    PairMetrics {
        accuracy: hits / n,
        f1_macro: 100.0 * f1.iter().sum::<f64>() / n_classes as f64,
        f1_weighted: 100.0
            * f1
                .iter()
                .zip(&support)
                .map(|(f, s)| f * s / n)
                .sum::<f64>(),
        kappa: if p_chance >= 1.0 {
            None
        } else {
            Some((p_observed - p_chance) / (1.0 - p_chance))
        },
    }
}

/// Student-t CDF closed form for one degree of freedom.
pub fn t_cdf_df1(t: f64) -> f64 {
    0.5 + t.atan() / PI
}

/// Student-t CDF closed form for two degrees of freedom.
pub fn t_cdf_df2(t: f64) -> f64 {
    0.5 + t / (2.0 * (2.0 + t * t).sqrt())
}

/// Gamma(k/2) by exact half-integer recursion from Gamma(1/2) = sqrt(pi)
/// and Gamma(1) = 1.
fn gamma_half(k: usize) -> f64 {
    let (mut value, mut x) = if k % 2 == 1 { (PI.sqrt(), 0.5) } else { (1.0, 1.0) };
    while x + 0.5 < k as f64 / 2.0 + 0.25 {
        value *= x;
        x += 1.0;
    }
    value
}

/// Student-t CDF by composite Simpson integration of the density from 0 to
/// |t|, with the normalizing constant from exact half-integer gammas.
pub fn t_cdf_simpson(t: f64, df: usize) -> f64 {
    let v = df as f64;
    let c = gamma_half(df + 1) / ((v * PI).sqrt() * gamma_half(df));
    let pdf = |x: f64| c * (1.0 + x * x / v).powf(-0.5 * (v + 1.0));
    let b = t.abs();
    let n = 100_000usize;
    let h = b / n as f64;
    let mut sum = pdf(0.0) + pdf(b);
    for i in 1..n {
        let weight = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += weight * pdf(i as f64 * h);
    }
    let integral = sum * h / 3.0;
    if t >= 0.0 {
        0.5 + integral
    } else {
        0.5 - integral
    }
}

fn jaccard_dist(x: &[f64], y: &[f64]) -> f64 {
    let mut min_sum = 0.0;
    let mut max_sum = 0.0;
    for (&a, &b) in x.iter().zip(y) {
        min_sum += a.min(b);
        max_sum += a.max(b);
    }
    if max_sum == 0.0 {
        0.0
    } else {
        1.0 - min_sum / max_sum
    }
}

/// Exhaustively search every 2-way partition of `points` (both sides
/// non-empty), scoring each by the summed Jaccard distance to the
/// component-mean centroid of its side. Returns the best assignment and
/// its objective.
pub fn brute_force_bipartition(points: &[Vec<f64>]) -> (Vec<usize>, f64) {
    let n = points.len();
    assert!((2..=16).contains(&n), "exhaustive search needs 2..=16 points");
    let d = points[0].len();
    let mut best: Option<(Vec<usize>, f64)> = None;
    for mask in 1u32..(1 << (n - 1)) {
        let assign: Vec<usize> = (0..n)
            .map(|i| if i == 0 { 0 } else { ((mask >> (i - 1)) & 1) as usize })
            .collect();
        let mut sums = vec![vec![0.0; d]; 2];
        let mut counts = [0usize; 2];
        for (point, &side) in points.iter().zip(&assign) {
            counts[side] += 1;
            for (s, &x) in sums[side].iter_mut().zip(point) {
                *s += x;
            }
        }
        let centroids: Vec<Vec<f64>> = (0..2)
            .map(|side| sums[side].iter().map(|s| s / counts[side] as f64).collect())
            .collect();
        let objective: f64 = points
            .iter()
            .zip(&assign)
            .map(|(p, &side)| jaccard_dist(p, &centroids[side]))
            .sum();
        if best.as_ref().is_none_or(|(_, o)| objective < *o) {
            best = Some((assign, objective));
        }
    }
    best.expect("at least one bipartition exists")
}

/// True when two binary assignments describe the same bipartition, up to
/// swapping the two cluster ids.
pub fn same_bipartition(a: &[usize], b: &[usize]) -> bool {
    a.len() == b.len()
        && (a.iter().zip(b).all(|(&x, &y)| x == y)
            || a.iter().zip(b).all(|(&x, &y)| x == 1 - y))
}
