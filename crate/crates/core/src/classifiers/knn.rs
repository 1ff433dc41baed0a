//! k-nearest-neighbour classification with Euclidean distance.

use super::argmax_tie_lowest;

#[derive(Debug, Clone)]
pub(super) struct KnnModel {
    k: usize,
    rows: Vec<Vec<f64>>,
    labels: Vec<usize>,
}

pub(super) fn fit(k: usize, rows: &[Vec<f64>], labels: &[usize]) -> KnnModel {
    KnnModel { k, rows: rows.to_vec(), labels: labels.to_vec() }
}

impl KnnModel {
    /// Majority vote among the k nearest training rows. Distance ties are
    /// broken by training-row order, vote ties by the lowest class id.
    pub(super) fn predict(&self, row: &[f64], n_classes: usize) -> usize {
        let mut neighbours: Vec<(f64, usize)> = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, train_row)| {
                let d2: f64 = train_row
                    .iter()
                    .zip(row)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum();
                (d2, i)
            })
            .collect();
        neighbours.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));

        let mut votes = vec![0.0; n_classes];
        for &(_, idx) in neighbours.iter().take(self.k.min(neighbours.len())) {
            votes[self.labels[idx]] += 1.0;
        }
        argmax_tie_lowest(&votes)
    }
}
