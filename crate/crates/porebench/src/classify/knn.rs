//! K-nearest neighbors on min-max scaled features.

use serde::{Deserialize, Serialize};

use crate::data::N_FEATURES;

use super::majority;

/// Stored training rows (already scaled) and their class indices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnnState {
    pub k: usize,
    pub rows: Vec<[f64; N_FEATURES]>,
    pub targets: Vec<usize>,
}

pub fn fit(rows: Vec<[f64; N_FEATURES]>, targets: Vec<usize>, k: usize) -> KnnState {
    KnnState { k, rows, targets }
}

/// Predicts by majority vote over the k nearest stored rows.
///
/// Neighbor order is by squared Euclidean distance, equal distances by
/// lower training-row index; vote ties break toward the lowest class index.
/// A k larger than the training set votes over every stored row.
pub fn predict(state: &KnnState, x: &[f64; N_FEATURES]) -> usize {
    let k = state.k.min(state.rows.len()).max(1);
    // Bounded insertion keeps the k best (distance, index) pairs in order.
    let mut best: Vec<(f64, usize)> = Vec::with_capacity(k + 1);
    for (i, row) in state.rows.iter().enumerate() {
        let mut d = 0.0;
        for j in 0..N_FEATURES {
            let diff = x[j] - row[j];
            d += diff * diff;
        }
        if best.len() == k {
            let worst = best[k - 1];
            if (d, i) >= (worst.0, worst.1) {
                continue;
            }
        }
        let pos = best.partition_point(|&(bd, bi)| (bd, bi) < (d, i));
        best.insert(pos, (d, i));
        best.truncate(k);
    }
    let n_classes = state.targets.iter().copied().max().unwrap_or(0) + 1;
    let mut votes = vec![0usize; n_classes];
    for &(_, i) in &best {
        votes[state.targets[i]] += 1;
    }
    majority(&votes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nearest_of_two_training_points() {
        // Scaled equivalents of {(0,0,10,0) -> class 0, (1,255,90,1) -> class 1}
        // under a min-max fit: the stored rows become the unit-cube corners.
        let state = fit(vec![[0.0; 4], [1.0; 4]], vec![0, 1], 1);
        // Query (0, 10, 12, 0) scaled by the same fit.
        let q = [0.0, 10.0 / 255.0, 2.0 / 80.0, 0.0];
        assert_eq!(predict(&state, &q), 0);
    }

    #[test]
    fn distance_ties_prefer_lower_row_index() {
        // Two identical rows with different classes; k = 1 must pick row 0.
        let state = fit(vec![[0.5; 4], [0.5; 4]], vec![1, 0], 1);
        assert_eq!(predict(&state, &[0.5; 4]), 1);
    }

    #[test]
    fn vote_ties_prefer_lowest_class_index() {
        let state = fit(
            vec![[0.0; 4], [1.0; 4], [0.0; 4], [1.0; 4]],
            vec![1, 0, 1, 0],
            4,
        );
        // Two votes each; class 0 wins the tie.
        assert_eq!(predict(&state, &[0.5; 4]), 0);
    }

    #[test]
    fn k_larger_than_training_set_votes_over_everything() {
        let state = fit(vec![[0.0; 4], [0.1; 4], [1.0; 4]], vec![0, 0, 1], 99);
        assert_eq!(predict(&state, &[1.0; 4]), 0);
    }

    #[test]
    fn memorizes_distinct_training_rows_at_k1() {
        let rows: Vec<[f64; 4]> = (0..40)
            .map(|i| [i as f64 / 40.0, (i * 7 % 40) as f64 / 40.0, 0.0, 1.0])
            .collect();
        let targets: Vec<usize> = (0..40).map(|i| i % 3).collect();
        let state = fit(rows.clone(), targets.clone(), 1);
        for (row, &t) in rows.iter().zip(targets.iter()) {
            assert_eq!(predict(&state, row), t);
        }
    }
}
