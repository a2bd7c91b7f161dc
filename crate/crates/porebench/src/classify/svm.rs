//! Linear one-vs-rest SVM trained by stochastic subgradient descent on the
//! hinge loss with step size `1/(lambda * t)`.
//!
//! All one-vs-rest problems advance together: each visited row updates
//! every class with a shared step counter, and the per-epoch row order is a
//! Fisher-Yates shuffle from a splitmix64 chain seeded by `shuffle_seed`
//! (the chain continues across epochs). The bias terms are unregularized.

use serde::{Deserialize, Serialize};

use crate::data::N_FEATURES;
use crate::rng::SplitMix64;

use super::argmax;

/// One hyperplane per class, on z-scored features.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvmState {
    pub weights: Vec<[f64; N_FEATURES]>,
    pub biases: Vec<f64>,
}

/// Runs one epoch of subgradient updates over `order`. `t0` is the incoming
/// step counter; the updated counter is returned.
pub fn svm_epoch(
    weights: &mut [[f64; N_FEATURES]],
    biases: &mut [f64],
    rows: &[[f64; N_FEATURES]],
    targets: &[usize],
    order: &[usize],
    lambda: f64,
    t0: u64,
) -> u64 {
    let mut t = t0;
    for &i in order {
        let x = &rows[i];
        let eta = 1.0 / (lambda * t as f64);
        let decay = 1.0 - eta * lambda;
        for (c, (w, b)) in weights.iter_mut().zip(biases.iter_mut()).enumerate() {
            let y = if targets[i] == c { 1.0 } else { -1.0 };
            let mut score = *b;
            for j in 0..N_FEATURES {
                score += w[j] * x[j];
            }
            if y * score < 1.0 {
                for j in 0..N_FEATURES {
                    w[j] = decay * w[j] + eta * y * x[j];
                }
                *b += eta * y;
            } else {
                for j in 0..N_FEATURES {
                    w[j] *= decay;
                }
            }
        }
        t += 1;
    }
    t
}

pub fn fit(
    rows: &[[f64; N_FEATURES]],
    targets: &[usize],
    n_classes: usize,
    lambda: f64,
    epochs: usize,
    shuffle_seed: u64,
) -> SvmState {
    let mut weights = vec![[0.0; N_FEATURES]; n_classes];
    let mut biases = vec![0.0; n_classes];
    let mut rng = SplitMix64::new(shuffle_seed);
    let mut t = 1u64;
    for _ in 0..epochs {
        let mut order: Vec<usize> = (0..rows.len()).collect();
        rng.shuffle(&mut order);
        t = svm_epoch(&mut weights, &mut biases, rows, targets, &order, lambda, t);
    }
    SvmState { weights, biases }
}

/// Argmax over per-class scores, ties toward the lowest class index.
pub fn predict(state: &SvmState, x: &[f64; N_FEATURES]) -> usize {
    let scores: Vec<f64> = state
        .weights
        .iter()
        .zip(&state.biases)
        .map(|(w, &b)| {
            let mut s = b;
            for j in 0..N_FEATURES {
                s += w[j] * x[j];
            }
            s
        })
        .collect();
    argmax(&scores)
}
