//! Per-feature scaling, fitted on training rows only.

use serde::{Deserialize, Serialize};

use crate::data::N_FEATURES;

/// Fitted feature scaler. Carried inside every trained model so that
/// prediction applies exactly the training-time transform.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum Scaler {
    /// Leaves features untouched.
    Identity,
    /// Maps each feature to [0, 1] over the training range. A constant
    /// feature maps to 0 (range treated as 1).
    MinMax { min: [f64; N_FEATURES], range: [f64; N_FEATURES] },
    /// Centers and divides by the training standard deviation; an sd of 0
    /// is replaced by 1.
    ZScore { mean: [f64; N_FEATURES], sd: [f64; N_FEATURES] },
}

impl Scaler {
    pub fn fit_identity() -> Scaler {
        Scaler::Identity
    }

    pub fn fit_min_max(rows: &[[f64; N_FEATURES]]) -> Scaler {
        let mut min = [f64::INFINITY; N_FEATURES];
        let mut max = [f64::NEG_INFINITY; N_FEATURES];
        for row in rows {
            for j in 0..N_FEATURES {
                min[j] = min[j].min(row[j]);
                max[j] = max[j].max(row[j]);
            }
        }
        let mut range = [1.0; N_FEATURES];
        for j in 0..N_FEATURES {
            let r = max[j] - min[j];
            range[j] = if r > 0.0 { r } else { 1.0 };
        }
        Scaler::MinMax { min, range }
    }

    pub fn fit_z_score(rows: &[[f64; N_FEATURES]]) -> Scaler {
        let n = rows.len().max(1) as f64;
        let mut mean = [0.0; N_FEATURES];
        for row in rows {
            for j in 0..N_FEATURES {
                mean[j] += row[j];
            }
        }
        for m in &mut mean {
            *m /= n;
        }
        let mut var = [0.0; N_FEATURES];
        for row in rows {
            for j in 0..N_FEATURES {
                let d = row[j] - mean[j];
                var[j] += d * d;
            }
        }
        let mut sd = [1.0; N_FEATURES];
        for j in 0..N_FEATURES {
            let s = (var[j] / n).sqrt();
            sd[j] = if s > 0.0 { s } else { 1.0 };
        }
        Scaler::ZScore { mean, sd }
    }

    pub fn transform(&self, row: &[f64; N_FEATURES]) -> [f64; N_FEATURES] {
        let mut out = *row;
        match self {
            Scaler::Identity => {}
            Scaler::MinMax { min, range } => {
                for j in 0..N_FEATURES {
                    out[j] = (out[j] - min[j]) / range[j];
                }
            }
            Scaler::ZScore { mean, sd } => {
                for j in 0..N_FEATURES {
                    out[j] = (out[j] - mean[j]) / sd[j];
                }
            }
        }
        out
    }

    pub fn transform_all(&self, rows: &[[f64; N_FEATURES]]) -> Vec<[f64; N_FEATURES]> {
        rows.iter().map(|r| self.transform(r)).collect()
    }
}
