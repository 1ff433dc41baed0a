//! Property suites over the data plumbing and clustering primitives.

use proptest::prelude::*;

use attrcluster::clustering::{jaccard_distance, jaccard_similarity};
use attrcluster::data::{generate_synthetic, min_max_scale, transpose, DataMatrix, LabeledDataset};
use attrcluster::evaluation::stratified_folds;

fn matrix(max_rows: usize, max_cols: usize) -> impl Strategy<Value = DataMatrix> {
    (1..=max_rows, 1..=max_cols).prop_flat_map(|(n, d)| {
        proptest::collection::vec(proptest::collection::vec(-100.0..100.0f64, d), n).prop_map(
            move |rows| {
                let names = (0..d).map(|j| format!("c{j}")).collect();
                DataMatrix::new(names, rows)
            },
        )
    })
}

fn nonneg_pair() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (1..12usize).prop_flat_map(|d| {
        (
            proptest::collection::vec(0.0..50.0f64, d),
            proptest::collection::vec(0.0..50.0f64, d),
        )
    })
}

fn labeled(n: usize, n_classes: usize) -> LabeledDataset {
    LabeledDataset {
        matrix: DataMatrix::new(
            vec!["x".to_string()],
            (0..n).map(|i| vec![i as f64]).collect(),
        ),
        labels: (0..n).map(|i| i % n_classes).collect(),
        label_name: "class".to_string(),
        class_names: (0..n_classes).map(|c| c.to_string()).collect(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn transpose_is_an_involution(m in matrix(8, 8)) {
        let back = transpose(&transpose(&m));
        prop_assert_eq!(&back.rows, &m.rows);
        prop_assert_eq!(&back.col_names, &m.col_names);
    }

    #[test]
    fn scaling_maps_each_column_onto_the_unit_interval(m in matrix(8, 6)) {
        let scaled = min_max_scale(&m);
        for j in 0..m.n_cols() {
            let col = m.column(j);
            let lo = col.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = col.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let scaled_col = scaled.column(j);
            prop_assert!(scaled_col.iter().all(|&v| (0.0..=1.0).contains(&v)));
            if hi > lo {
                prop_assert!(scaled_col.contains(&0.0));
                prop_assert!(scaled_col.contains(&1.0));
            } else {
                prop_assert!(scaled_col.iter().all(|&v| v == 0.0));
            }
        }
    }

    #[test]
    fn jaccard_similarity_is_symmetric_bounded_and_reflexive((x, y) in nonneg_pair()) {
        let xy = jaccard_similarity(&x, &y).unwrap();
        let yx = jaccard_similarity(&y, &x).unwrap();
        prop_assert_eq!(xy, yx);
        prop_assert!((0.0..=1.0).contains(&xy));
        prop_assert_eq!(jaccard_similarity(&x, &x).unwrap(), 1.0);
        prop_assert_eq!(jaccard_distance(&x, &y).unwrap(), 1.0 - xy);
    }

    #[test]
    fn folds_partition_the_indices_with_balanced_classes(
        n in 10..60usize,
        f in 2..6usize,
        n_classes in 2..5usize,
        seed in any::<u64>(),
    ) {
        let ds = labeled(n, n_classes);
        let folds = stratified_folds(&ds, f, seed).unwrap();
        prop_assert_eq!(folds.len(), f);

        let mut all: Vec<usize> = folds.iter().flatten().copied().collect();
        all.sort_unstable();
        prop_assert_eq!(all, (0..n).collect::<Vec<_>>());

        for class in 0..n_classes {
            let counts: Vec<usize> = folds
                .iter()
                .map(|fold| fold.iter().filter(|&&i| ds.labels[i] == class).count())
                .collect();
            let spread = counts.iter().max().unwrap() - counts.iter().min().unwrap();
            prop_assert!(spread <= 1, "class {class} fold counts {counts:?}");
        }

        let again = stratified_folds(&ds, f, seed).unwrap();
        prop_assert_eq!(folds, again);
    }
}

#[test]
fn synthetic_generation_is_deterministic_per_seed() {
    let a = generate_synthetic(80, 2, 3, 2, 0.7, 21).unwrap();
    let b = generate_synthetic(80, 2, 3, 2, 0.7, 21).unwrap();
    assert_eq!(a, b);
    let c = generate_synthetic(80, 2, 3, 2, 0.7, 22).unwrap();
    assert_ne!(a.matrix.rows, c.matrix.rows);
}
