//! Random forest of CART-style trees: Gini split criterion, bootstrap
//! bagging, and per-node random feature subsets.
//!
//! Trees route a value left when it is less than or equal to the largest
//! training value observed on the left branch (an order statistic), so any
//! strictly increasing transform of a feature column leaves routing
//! unchanged. The conventional midpoint threshold is kept alongside for
//! reporting and serialization.
//!
//! Determinism: tree `i` runs its own splitmix64 chain seeded by the `i`-th
//! output of a chain over `rf_seed` (see [`tree_seeds`]). Within a tree the
//! draw order is: bootstrap indices first, then one feature-subset draw per
//! visited node, depth first, left child before right.

use serde::{Deserialize, Serialize};

use crate::data::N_FEATURES;
use crate::error::{Error, Result};
use crate::rng::SplitMix64;

use super::majority;

/// Gini impurity `1 - sum((c_i / n)^2)` of a class count vector.
pub fn gini_impurity(counts: &[usize]) -> Result<f64> {
    let total: usize = counts.iter().sum();
    if total == 0 {
        return Err(Error::Validation("gini impurity of all-zero counts".into()));
    }
    Ok(gini_of(counts, total))
}

fn gini_of(counts: &[usize], total: usize) -> f64 {
    let n = total as f64;
    let mut sum_sq = 0.0;
    for &c in counts {
        let p = c as f64 / n;
        sum_sq += p * p;
    }
    1.0 - sum_sq
}

/// Draws `n` indices uniformly with replacement from `[0, n)`.
pub fn rf_bootstrap(rng: &mut SplitMix64, n: usize) -> Vec<usize> {
    (0..n).map(|_| rng.uniform_int(0, n as i64 - 1) as usize).collect()
}

/// Per-tree seeds derived from the forest seed; tree `i` uses `seeds[i]`.
pub fn tree_seeds(rf_seed: u64, n_trees: usize) -> Vec<u64> {
    let mut rng = SplitMix64::new(rf_seed);
    (0..n_trees).map(|_| rng.next_u64()).collect()
}

/// A chosen split: the conventional midpoint `threshold` between the two
/// bracketing training values, and `left_max` (the larger value on the left
/// side) actually used for routing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitChoice {
    pub feature: usize,
    pub threshold: f64,
    pub left_max: f64,
    pub weighted_gini: f64,
}

/// Finds the split minimizing child-count-weighted Gini impurity over the
/// candidate features, enumerating thresholds at midpoints between
/// consecutive distinct sorted values. Ties break toward the lower feature
/// index, then the lower threshold. Returns `None` when the node is pure or
/// no candidate feature has two distinct values.
pub fn best_split(
    rows: &[[f64; N_FEATURES]],
    targets: &[usize],
    indices: &[usize],
    candidates: &[usize],
    n_classes: usize,
) -> Option<SplitChoice> {
    let total = indices.len();
    let mut total_counts = vec![0usize; n_classes];
    for &i in indices {
        total_counts[targets[i]] += 1;
    }
    if total_counts.iter().filter(|&&c| c > 0).count() <= 1 {
        return None;
    }

    let mut best: Option<SplitChoice> = None;
    let mut sorted: Vec<(f64, usize)> = Vec::with_capacity(total);
    let mut features: Vec<usize> = candidates.to_vec();
    features.sort_unstable();
    features.dedup();

    for &feature in &features {
        sorted.clear();
        sorted.extend(indices.iter().map(|&i| (rows[i][feature], targets[i])));
        sorted.sort_by(|a, b| a.0.total_cmp(&b.0));

        let mut left_counts = vec![0usize; n_classes];
        let mut right_counts = total_counts.clone();
        for i in 0..total - 1 {
            let (value, target) = sorted[i];
            left_counts[target] += 1;
            right_counts[target] -= 1;
            let next_value = sorted[i + 1].0;
            if next_value <= value {
                continue;
            }
            let n_left = i + 1;
            let n_right = total - n_left;
            let weighted = (n_left as f64 * gini_of(&left_counts, n_left)
                + n_right as f64 * gini_of(&right_counts, n_right))
                / total as f64;
            let candidate = SplitChoice {
                feature,
                threshold: 0.5 * (value + next_value),
                left_max: value,
                weighted_gini: weighted,
            };
            // Strict improvement only: enumeration order (feature asc,
            // threshold asc) realizes the tie rule.
            if best.map_or(true, |b| weighted < b.weighted_gini) {
                best = Some(candidate);
            }
        }
    }
    best
}

/// One tree node in the flat arena.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "snake_case")]
pub enum Node {
    Leaf { class: usize },
    Split { feature: usize, threshold: f64, left_max: f64, left: usize, right: usize },
}

/// A decision tree stored as a flat node arena.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    pub nodes: Vec<Node>,
    pub root: usize,
}

impl Tree {
    pub fn predict(&self, x: &[f64; N_FEATURES]) -> usize {
        let mut at = self.root;
        loop {
            match self.nodes[at] {
                Node::Leaf { class } => return class,
                Node::Split { feature, left_max, left, right, .. } => {
                    at = if x[feature] <= left_max { left } else { right };
                }
            }
        }
    }
}

pub(crate) struct TreeParams {
    pub max_depth: Option<usize>,
    pub min_samples_split: usize,
    pub features_per_split: usize,
}

/// Draws a feature subset via partial Fisher-Yates over all features.
/// Always consumes exactly `m` draws; the result is sorted.
fn draw_feature_subset(rng: &mut SplitMix64, m: usize) -> Vec<usize> {
    let mut pool: [usize; N_FEATURES] = [0, 1, 2, 3];
    for i in 0..m {
        let j = rng.uniform_int(i as i64, N_FEATURES as i64 - 1) as usize;
        pool.swap(i, j);
    }
    let mut subset = pool[..m].to_vec();
    subset.sort_unstable();
    subset
}

fn build_node(
    tree: &mut Tree,
    rows: &[[f64; N_FEATURES]],
    targets: &[usize],
    indices: &[usize],
    n_classes: usize,
    depth: usize,
    params: &TreeParams,
    rng: &mut SplitMix64,
) -> usize {
    let mut counts = vec![0usize; n_classes];
    for &i in indices {
        counts[targets[i]] += 1;
    }
    let leaf = |tree: &mut Tree, counts: &[usize]| {
        tree.nodes.push(Node::Leaf { class: majority(counts) });
        tree.nodes.len() - 1
    };

    let pure = counts.iter().filter(|&&c| c > 0).count() <= 1;
    let depth_capped = params.max_depth.is_some_and(|d| depth >= d);
    if pure || depth_capped || indices.len() < params.min_samples_split {
        return leaf(tree, &counts);
    }

    let candidates = draw_feature_subset(rng, params.features_per_split);
    let Some(split) = best_split(rows, targets, indices, &candidates, n_classes) else {
        return leaf(tree, &counts);
    };

    let (left_idx, right_idx): (Vec<usize>, Vec<usize>) =
        indices.iter().partition(|&&i| rows[i][split.feature] <= split.left_max);
    let left = build_node(tree, rows, targets, &left_idx, n_classes, depth + 1, params, rng);
    let right = build_node(tree, rows, targets, &right_idx, n_classes, depth + 1, params, rng);
    tree.nodes.push(Node::Split {
        feature: split.feature,
        threshold: split.threshold,
        left_max: split.left_max,
        left,
        right,
    });
    tree.nodes.len() - 1
}

/// Builds one tree over the given row indices with its own rng chain.
pub(crate) fn build_tree(
    rows: &[[f64; N_FEATURES]],
    targets: &[usize],
    indices: &[usize],
    n_classes: usize,
    params: &TreeParams,
    rng: &mut SplitMix64,
) -> Tree {
    let mut tree = Tree { nodes: Vec::new(), root: 0 };
    tree.root = build_node(&mut tree, rows, targets, indices, n_classes, 0, params, rng);
    tree
}

/// Fitted forest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestState {
    pub trees: Vec<Tree>,
    pub n_classes: usize,
}

#[allow(clippy::too_many_arguments)]
pub fn fit(
    rows: &[[f64; N_FEATURES]],
    targets: &[usize],
    n_classes: usize,
    n_estimators: usize,
    max_depth: Option<usize>,
    min_samples_split: usize,
    features_per_split: usize,
    rf_seed: u64,
) -> ForestState {
    let params = TreeParams { max_depth, min_samples_split, features_per_split };
    let trees = tree_seeds(rf_seed, n_estimators)
        .into_iter()
        .map(|seed| {
            let mut rng = SplitMix64::new(seed);
            let sample = rf_bootstrap(&mut rng, rows.len());
            build_tree(rows, targets, &sample, n_classes, &params, &mut rng)
        })
        .collect();
    ForestState { trees, n_classes }
}

/// Majority vote over the trees, ties toward the lowest class index.
pub fn predict(state: &ForestState, x: &[f64; N_FEATURES]) -> usize {
    let mut votes = vec![0usize; state.n_classes.max(1)];
    for tree in &state.trees {
        votes[tree.predict(x)] += 1;
    }
    majority(&votes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::GenConfig;
    use crate::datagen::generate_dataset;

    #[test]
    fn gini_examples() {
        assert_eq!(gini_impurity(&[2, 2]).unwrap(), 0.5);
        assert_eq!(gini_impurity(&[4, 0, 0, 0]).unwrap(), 0.0);
        assert_eq!(gini_impurity(&[1, 1, 1, 1]).unwrap(), 0.75);
        assert!(gini_impurity(&[0, 0]).is_err());
    }

    #[test]
    fn bootstrap_of_one_row_is_that_row() {
        let mut rng = SplitMix64::new(1);
        assert_eq!(rf_bootstrap(&mut rng, 1), vec![0]);
    }

    #[test]
    fn bootstrap_is_deterministic_per_state() {
        let a = rf_bootstrap(&mut SplitMix64::new(5), 100);
        let b = rf_bootstrap(&mut SplitMix64::new(5), 100);
        assert_eq!(a, b);
    }

    // Uniformity of one 10,000-draw bootstrap, checked through the
    // chi-square statistic (whose multinomial expectation is n-1) plus a
    // generous per-index count cap.
    #[test]
    fn bootstrap_draw_looks_uniform() {
        let n = 10_000;
        let sample = rf_bootstrap(&mut SplitMix64::new(2024), n);
        let mut counts = vec![0usize; n];
        for i in sample {
            counts[i] += 1;
        }
        let chi2: f64 = counts.iter().map(|&c| (c as f64 - 1.0).powi(2)).sum();
        let dof = (n - 1) as f64;
        let sigma = (2.0 * dof).sqrt();
        assert!(
            (chi2 - dof).abs() <= 3.0 * sigma,
            "chi-square {chi2} outside {dof} +/- {}",
            3.0 * sigma
        );
        let max_count = counts.iter().copied().max().unwrap();
        assert!(max_count <= 9, "some index drawn {max_count} times");
    }

    #[test]
    fn best_split_on_two_separated_pairs() {
        let rows = vec![
            [1.0, 0.0, 0.0, 0.0],
            [2.0, 0.0, 0.0, 0.0],
            [8.0, 0.0, 0.0, 0.0],
            [9.0, 0.0, 0.0, 0.0],
        ];
        let targets = vec![0, 0, 1, 1];
        let s = best_split(&rows, &targets, &[0, 1, 2, 3], &[0], 2).unwrap();
        assert_eq!(s.feature, 0);
        assert_eq!(s.threshold, 5.0);
        assert_eq!(s.left_max, 2.0);
        assert_eq!(s.weighted_gini, 0.0);
    }

    #[test]
    fn pure_node_has_no_split() {
        let rows = vec![[1.0, 0.0, 0.0, 0.0], [2.0, 0.0, 0.0, 0.0]];
        assert!(best_split(&rows, &[0, 0], &[0, 1], &[0, 1, 2, 3], 2).is_none());
    }

    #[test]
    fn identical_values_with_mixed_labels_have_no_split() {
        let rows = vec![[3.0, 1.0, 2.0, 0.0]; 4];
        let targets = vec![0, 1, 0, 1];
        assert!(best_split(&rows, &targets, &[0, 1, 2, 3], &[0, 1, 2, 3], 2).is_none());
    }

    #[test]
    fn split_ties_prefer_lower_feature_then_lower_threshold() {
        // Features 0 and 1 both separate perfectly; feature 0 must win.
        let rows = vec![[1.0, 5.0, 0.0, 0.0], [2.0, 6.0, 0.0, 0.0]];
        let targets = vec![0, 1];
        let s = best_split(&rows, &targets, &[0, 1], &[1, 0], 2).unwrap();
        assert_eq!(s.feature, 0);
        assert_eq!(s.threshold, 1.5);
    }

    // Consistent data is perfectly separable by axis-aligned splits: a
    // single unbounded tree over the full sample memorizes it.
    #[test]
    fn single_tree_memorizes_noiseless_data() {
        let cfg = GenConfig {
            seed: 3,
            n_samples: 500,
            jitter_pixel_sd: 0.0,
            jitter_grad_sd: 0.0,
            p_flip: 0.0,
            ..GenConfig::default()
        };
        let data = generate_dataset(&cfg).unwrap();
        let rows = data.feature_matrix();
        let labels = data.labels();
        let classes = super::super::class_list(&labels);
        let targets: Vec<usize> = labels
            .iter()
            .map(|l| classes.iter().position(|c| c == l).unwrap())
            .collect();
        let params =
            TreeParams { max_depth: None, min_samples_split: 2, features_per_split: 4 };
        let indices: Vec<usize> = (0..rows.len()).collect();
        let mut rng = SplitMix64::new(3);
        let tree = build_tree(&rows, &targets, &indices, classes.len(), &params, &mut rng);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(tree.predict(row), targets[i], "row {i}");
        }
    }

    #[test]
    fn all_leaves_one_class_predicts_that_class() {
        let rows = vec![[0.0, 1.0, 2.0, 3.0], [5.0, 6.0, 7.0, 8.0], [1.0, 1.0, 1.0, 1.0]];
        let targets = vec![0, 0, 0];
        let state = fit(&rows, &targets, 1, 5, None, 2, 2, 9);
        assert_eq!(predict(&state, &[100.0, -100.0, 0.0, 42.0]), 0);
        assert_eq!(predict(&state, &[0.0, 0.0, 0.0, 0.0]), 0);
    }

    #[test]
    fn refit_reproduces_tree_structures() {
        let cfg = GenConfig { n_samples: 300, ..GenConfig::default() };
        let data = generate_dataset(&cfg).unwrap();
        let rows = data.feature_matrix();
        let labels = data.labels();
        let classes = super::super::class_list(&labels);
        let targets: Vec<usize> = labels
            .iter()
            .map(|l| classes.iter().position(|c| c == l).unwrap())
            .collect();
        let a = fit(&rows, &targets, classes.len(), 6, None, 2, 2, 3);
        let b = fit(&rows, &targets, classes.len(), 6, None, 2, 2, 3);
        assert_eq!(a, b);
    }
}
