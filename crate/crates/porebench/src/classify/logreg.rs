//! Multinomial (softmax) logistic regression trained by full-batch
//! gradient descent on L2-regularized cross-entropy.
//!
//! One coherent probabilistic model covers all classes; the bias terms are
//! not regularized. Training stops at `max_iter` or as soon as the loss
//! decrease falls below `tol`.

use serde::{Deserialize, Serialize};

use crate::data::N_FEATURES;
use crate::error::{Error, Result};

use super::argmax;

/// One weight row and bias per class, on z-scored features.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogRegState {
    pub weights: Vec<[f64; N_FEATURES]>,
    pub biases: Vec<f64>,
    /// Loss at the final accepted iterate.
    pub final_loss: f64,
    /// Gradient-descent iterations actually run.
    pub iterations: usize,
}

/// Numerically safe softmax (max-subtraction before exponentiation).
pub fn softmax(scores: &[f64]) -> Vec<f64> {
    let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = scores.iter().map(|&s| (s - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.iter().map(|&e| e / sum).collect()
}

fn class_scores(
    weights: &[[f64; N_FEATURES]],
    biases: &[f64],
    x: &[f64; N_FEATURES],
) -> Vec<f64> {
    weights
        .iter()
        .zip(biases)
        .map(|(w, &b)| {
            let mut s = b;
            for j in 0..N_FEATURES {
                s += w[j] * x[j];
            }
            s
        })
        .collect()
}

/// Mean cross-entropy plus `l2/2 * ||W||^2` and its gradient over the batch.
pub fn loss_and_grad(
    weights: &[[f64; N_FEATURES]],
    biases: &[f64],
    rows: &[[f64; N_FEATURES]],
    targets: &[usize],
    l2: f64,
) -> (f64, Vec<[f64; N_FEATURES]>, Vec<f64>) {
    let n_classes = weights.len();
    let n = rows.len() as f64;
    let mut loss = 0.0;
    let mut grad_w = vec![[0.0; N_FEATURES]; n_classes];
    let mut grad_b = vec![0.0; n_classes];

    for (x, &t) in rows.iter().zip(targets) {
        let probs = softmax(&class_scores(weights, biases, x));
        loss -= probs[t].ln();
        for c in 0..n_classes {
            let err = probs[c] - f64::from(u8::from(c == t));
            grad_b[c] += err;
            for j in 0..N_FEATURES {
                grad_w[c][j] += err * x[j];
            }
        }
    }
    loss /= n;
    for c in 0..n_classes {
        grad_b[c] /= n;
        for j in 0..N_FEATURES {
            grad_w[c][j] /= n;
            grad_w[c][j] += l2 * weights[c][j];
            loss += 0.5 * l2 * weights[c][j] * weights[c][j];
        }
    }
    (loss, grad_w, grad_b)
}

/// One full-batch gradient step. Returns the loss at the *input* weights;
/// the weights are updated in place.
pub fn train_step(
    weights: &mut [[f64; N_FEATURES]],
    biases: &mut [f64],
    rows: &[[f64; N_FEATURES]],
    targets: &[usize],
    learning_rate: f64,
    l2: f64,
) -> f64 {
    let (loss, grad_w, grad_b) = loss_and_grad(weights, biases, rows, targets, l2);
    for c in 0..weights.len() {
        biases[c] -= learning_rate * grad_b[c];
        for j in 0..N_FEATURES {
            weights[c][j] -= learning_rate * grad_w[c][j];
        }
    }
    loss
}

/// Runs gradient descent and records the loss at every iteration.
pub fn fit_with_trace(
    rows: &[[f64; N_FEATURES]],
    targets: &[usize],
    n_classes: usize,
    learning_rate: f64,
    l2: f64,
    max_iter: usize,
    tol: f64,
) -> Result<(LogRegState, Vec<f64>)> {
    let mut weights = vec![[0.0; N_FEATURES]; n_classes];
    let mut biases = vec![0.0; n_classes];
    let mut trace = Vec::new();
    let mut prev: Option<f64> = None;
    let mut iterations = 0;

    for _ in 0..max_iter {
        let (loss, grad_w, grad_b) = loss_and_grad(&weights, &biases, rows, targets, l2);
        if !loss.is_finite() {
            return Err(Error::NonFiniteLoss(format!(
                "logistic regression diverged at iteration {iterations} \
                 (learning_rate {learning_rate}, l2 {l2})"
            )));
        }
        trace.push(loss);
        if let Some(p) = prev {
            if p - loss < tol {
                break;
            }
        }
        prev = Some(loss);
        for c in 0..n_classes {
            biases[c] -= learning_rate * grad_b[c];
            for j in 0..N_FEATURES {
                weights[c][j] -= learning_rate * grad_w[c][j];
            }
        }
        iterations += 1;
    }

    let final_loss = trace.last().copied().unwrap_or(f64::NAN);
    Ok((LogRegState { weights, biases, final_loss, iterations }, trace))
}

pub fn fit(
    rows: &[[f64; N_FEATURES]],
    targets: &[usize],
    n_classes: usize,
    learning_rate: f64,
    l2: f64,
    max_iter: usize,
    tol: f64,
) -> Result<LogRegState> {
    fit_with_trace(rows, targets, n_classes, learning_rate, l2, max_iter, tol).map(|(s, _)| s)
}

/// Argmax over class scores, ties toward the lowest class index.
pub fn predict(state: &LogRegState, x: &[f64; N_FEATURES]) -> usize {
    argmax(&class_scores(&state.weights, &state.biases, x))
}
