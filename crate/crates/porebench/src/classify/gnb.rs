//! Gaussian naive Bayes.

use serde::{Deserialize, Serialize};

use crate::data::N_FEATURES;
use crate::error::{Error, Result};

use super::argmax;

/// Per-class priors and per-class/per-feature Gaussian moments.
///
/// `variances` are stored post-flooring: every entry is at least
/// `var_smoothing` times the largest pooled per-feature variance over the
/// whole training set (or `var_smoothing` itself when the data is fully
/// degenerate), so the log-density below is always finite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GnbState {
    pub priors: Vec<f64>,
    pub means: Vec<[f64; N_FEATURES]>,
    pub variances: Vec<[f64; N_FEATURES]>,
    pub var_floor: f64,
}

/// Computes class frequencies and per-class feature moments.
pub fn fit(
    rows: &[[f64; N_FEATURES]],
    targets: &[usize],
    n_classes: usize,
    var_smoothing: f64,
) -> Result<GnbState> {
    if rows.is_empty() {
        return Err(Error::Training("naive Bayes needs at least one row".into()));
    }
    let n = rows.len() as f64;

    let mut counts = vec![0usize; n_classes];
    let mut means = vec![[0.0; N_FEATURES]; n_classes];
    for (row, &t) in rows.iter().zip(targets) {
        counts[t] += 1;
        for j in 0..N_FEATURES {
            means[t][j] += row[j];
        }
    }
    for (c, mean) in means.iter_mut().enumerate() {
        if counts[c] > 0 {
            for m in mean.iter_mut() {
                *m /= counts[c] as f64;
            }
        }
    }

    let mut variances = vec![[0.0; N_FEATURES]; n_classes];
    for (row, &t) in rows.iter().zip(targets) {
        for j in 0..N_FEATURES {
            let d = row[j] - means[t][j];
            variances[t][j] += d * d;
        }
    }
    for (c, var) in variances.iter_mut().enumerate() {
        if counts[c] > 0 {
            for v in var.iter_mut() {
                *v /= counts[c] as f64;
            }
        }
    }

    // Pooled per-feature variance over the whole training set sets the floor.
    let mut pooled_mean = [0.0; N_FEATURES];
    for row in rows {
        for j in 0..N_FEATURES {
            pooled_mean[j] += row[j];
        }
    }
    for m in &mut pooled_mean {
        *m /= n;
    }
    let mut pooled_var = [0.0; N_FEATURES];
    for row in rows {
        for j in 0..N_FEATURES {
            let d = row[j] - pooled_mean[j];
            pooled_var[j] += d * d;
        }
    }
    let max_pooled = pooled_var.iter().map(|v| v / n).fold(0.0f64, f64::max);
    let mut var_floor = var_smoothing * max_pooled;
    if var_floor <= 0.0 {
        var_floor = var_smoothing;
    }
    for var in &mut variances {
        for v in var.iter_mut() {
            if *v < var_floor {
                *v = var_floor;
            }
        }
    }

    let priors = counts.iter().map(|&c| c as f64 / n).collect();
    Ok(GnbState { priors, means, variances, var_floor })
}

/// Joint log-likelihood of `x` under class `c` (up to the shared constant).
fn log_posterior(state: &GnbState, c: usize, x: &[f64; N_FEATURES]) -> f64 {
    if state.priors[c] == 0.0 {
        return f64::NEG_INFINITY;
    }
    let mut ll = state.priors[c].ln();
    for j in 0..N_FEATURES {
        let var = state.variances[c][j];
        let d = x[j] - state.means[c][j];
        ll += -0.5 * (std::f64::consts::TAU * var).ln() - d * d / (2.0 * var);
    }
    ll
}

/// Argmax of prior-weighted Gaussian log-densities, ties toward the lowest
/// class index.
pub fn predict(state: &GnbState, x: &[f64; N_FEATURES]) -> usize {
    let scores: Vec<f64> =
        (0..state.priors.len()).map(|c| log_posterior(state, c, x)).collect();
    argmax(&scores)
}
