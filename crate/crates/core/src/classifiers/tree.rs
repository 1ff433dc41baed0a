//! CART-style decision tree with Gini impurity and midpoint thresholds.

#[derive(Debug, Clone)]
enum Node {
    Leaf { class: usize },
    Split { attr: usize, threshold: f64, left: usize, right: usize },
}

#[derive(Debug, Clone)]
pub(super) struct TreeModel {
    nodes: Vec<Node>,
}

fn gini(counts: &[usize], total: usize) -> f64 {
    let n = total as f64;
    1.0 - counts.iter().map(|&c| (c as f64 / n).powi(2)).sum::<f64>()
}

fn majority(counts: &[usize]) -> usize {
    let mut best = 0;
    for (c, &count) in counts.iter().enumerate().skip(1) {
        if count > counts[best] {
            best = c;
        }
    }
    best
}

struct Builder<'a> {
    rows: &'a [Vec<f64>],
    labels: &'a [usize],
    n_classes: usize,
    max_depth: usize,
    min_split: usize,
    nodes: Vec<Node>,
}

impl Builder<'_> {
    fn class_counts(&self, indices: &[usize]) -> Vec<usize> {
        let mut counts = vec![0; self.n_classes];
        for &i in indices {
            counts[self.labels[i]] += 1;
        }
        counts
    }

    /// Lowest weighted child impurity over all (attribute, midpoint)
    /// candidates; ties keep the first candidate in scan order.
    fn best_split(&self, indices: &[usize]) -> Option<(usize, f64, f64)> {
        let d = self.rows[0].len();
        let mut best: Option<(usize, f64, f64)> = None;
        for attr in 0..d {
            let mut values: Vec<f64> = indices.iter().map(|&i| self.rows[i][attr]).collect();
            values.sort_by(|a, b| a.partial_cmp(b).unwrap());
            values.dedup();
            for pair in values.windows(2) {
                let threshold = (pair[0] + pair[1]) / 2.0;
                let mut left = vec![0; self.n_classes];
                let mut right = vec![0; self.n_classes];
                let mut n_left = 0;
                for &i in indices {
                    if self.rows[i][attr] <= threshold {
                        left[self.labels[i]] += 1;
                        n_left += 1;
                    } else {
                        right[self.labels[i]] += 1;
                    }
                }
                let n_right = indices.len() - n_left;
                let weighted = (n_left as f64 * gini(&left, n_left)
                    + n_right as f64 * gini(&right, n_right))
                    / indices.len() as f64;
                if best.is_none_or(|(_, _, b)| weighted < b) {
                    best = Some((attr, threshold, weighted));
                }
            }
        }
        best
    }

    fn build(&mut self, indices: &[usize], depth: usize) -> usize {
        let counts = self.class_counts(indices);
        let pure = counts.iter().filter(|&&c| c > 0).count() <= 1;
        if pure || depth >= self.max_depth || indices.len() < self.min_split {
            self.nodes.push(Node::Leaf { class: majority(&counts) });
            return self.nodes.len() - 1;
        }
        let Some((attr, threshold, _)) = self.best_split(indices) else {
            self.nodes.push(Node::Leaf { class: majority(&counts) });
            return self.nodes.len() - 1;
        };
        let (left_idx, right_idx): (Vec<usize>, Vec<usize>) =
            indices.iter().partition(|&&i| self.rows[i][attr] <= threshold);
        let left = self.build(&left_idx, depth + 1);
        let right = self.build(&right_idx, depth + 1);
        self.nodes.push(Node::Split { attr, threshold, left, right });
        self.nodes.len() - 1
    }
}

pub(super) fn fit(
    rows: &[Vec<f64>],
    labels: &[usize],
    n_classes: usize,
    max_depth: usize,
    min_split: usize,
) -> TreeModel {
    let mut builder =
        Builder { rows, labels, n_classes, max_depth, min_split, nodes: Vec::new() };
    let indices: Vec<usize> = (0..rows.len()).collect();
    builder.build(&indices, 0);
    // The root is pushed last; rotate it to the front for predict.
    let root = builder.nodes.len() - 1;
    let mut nodes = builder.nodes;
    nodes.swap(0, root);
    // Fix any child index that pointed at the old slot 0 or the old root.
    if root != 0 {
        for node in nodes.iter_mut() {
            if let Node::Split { left, right, .. } = node {
                for child in [left, right] {
                    if *child == 0 {
                        *child = root;
                    }
                }
            }
        }
    }
    TreeModel { nodes }
}

impl TreeModel {
    pub(super) fn predict(&self, row: &[f64]) -> usize {
        let mut at = 0;
        loop {
            match &self.nodes[at] {
                Node::Leaf { class } => return *class,
                Node::Split { attr, threshold, left, right } => {
                    at = if row[*attr] <= *threshold { *left } else { *right };
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn depth_zero_predicts_majority_class() {
        let rows = vec![vec![0.0], vec![1.0], vec![2.0], vec![3.0], vec![4.0]];
        let labels = vec![1, 1, 1, 0, 0];
        let model = fit(&rows, &labels, 2, 0, 2);
        for row in &rows {
            assert_eq!(model.predict(row), 1);
        }
    }

    #[test]
    fn single_threshold_split_is_learned_exactly() {
        let rows: Vec<Vec<f64>> = (0..10).map(|i| vec![i as f64]).collect();
        let labels: Vec<usize> = (0..10).map(|i| usize::from(i >= 5)).collect();
        let model = fit(&rows, &labels, 2, 10, 2);
        // The best split lands on the 4/5 midpoint, 4.5.
        assert_eq!(model.predict(&[4.4]), 0);
        assert_eq!(model.predict(&[4.6]), 1);
        assert_eq!(model.predict(&[-100.0]), 0);
        assert_eq!(model.predict(&[100.0]), 1);
    }

    #[test]
    fn xor_pattern_needs_two_levels_and_gets_them() {
        let rows = vec![
            vec![0.0, 0.0],
            vec![0.0, 1.0],
            vec![1.0, 0.0],
            vec![1.0, 1.0],
        ];
        let labels = vec![0, 1, 1, 0];
        let model = fit(&rows, &labels, 2, 10, 2);
        for (row, &label) in rows.iter().zip(&labels) {
            assert_eq!(model.predict(row), label);
        }
    }

    #[test]
    fn distinct_rows_reach_pure_leaves_when_depth_allows() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        let rows: Vec<Vec<f64>> = (0..60)
            .map(|_| (0..3).map(|_| rng.gen_range(0.0..1.0)).collect())
            .collect();
        let labels: Vec<usize> = (0..60).map(|_| rng.gen_range(0..3)).collect();
        let model = fit(&rows, &labels, 3, usize::MAX, 2);
        for (row, &label) in rows.iter().zip(&labels) {
            assert_eq!(model.predict(row), label);
        }
    }

    #[test]
    fn min_split_keeps_small_nodes_as_leaves() {
        let rows = vec![vec![0.0], vec![1.0], vec![2.0], vec![3.0]];
        let labels = vec![0, 1, 0, 1];
        // A min_split above the node size forbids every split.
        let model = fit(&rows, &labels, 2, 10, 5);
        for row in &rows {
            assert_eq!(model.predict(row), 0);
        }
    }

    #[test]
    fn max_depth_one_uses_single_best_split() {
        let rows = vec![vec![0.0], vec![1.0], vec![2.0], vec![10.0], vec![11.0], vec![12.0]];
        let labels = vec![0, 0, 0, 1, 1, 1];
        let model = fit(&rows, &labels, 2, 1, 2);
        assert_eq!(model.predict(&[1.0]), 0);
        assert_eq!(model.predict(&[11.0]), 1);
    }
}
