//! From-scratch classifiers behind a uniform fit/predict interface.
//!
//! Five algorithms are implemented: k-nearest neighbors, Gaussian naive
//! Bayes, multinomial logistic regression, linear one-vs-rest SVM, and a
//! random forest. Every tie anywhere (votes, distances, scores) breaks
//! toward the class that appears earliest in the training data, and every
//! stochastic step is driven by a config seed, so fit and predict are pure
//! functions of `(config, data)`.

pub mod forest;
pub mod gnb;
pub mod knn;
pub mod logreg;
pub mod svm;

use serde::{Deserialize, Serialize};

use crate::data::{Dataset, FeatureVector, Label, N_FEATURES};
use crate::error::{Error, Result};
use crate::scale::Scaler;

/// Algorithm identifier, in the canonical suite order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AlgorithmKind {
    Knn,
    GaussianNb,
    LogisticRegression,
    LinearSvm,
    RandomForest,
}

impl AlgorithmKind {
    pub const ALL: [AlgorithmKind; 5] = [
        AlgorithmKind::Knn,
        AlgorithmKind::GaussianNb,
        AlgorithmKind::LogisticRegression,
        AlgorithmKind::LinearSvm,
        AlgorithmKind::RandomForest,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AlgorithmKind::Knn => "KNN",
            AlgorithmKind::GaussianNb => "GaussianNB",
            AlgorithmKind::LogisticRegression => "LogisticRegression",
            AlgorithmKind::LinearSvm => "LinearSVM",
            AlgorithmKind::RandomForest => "RandomForest",
        }
    }

    /// Parses a user-facing algorithm name (several short forms accepted).
    pub fn parse(text: &str) -> Result<AlgorithmKind> {
        match text.trim().to_ascii_lowercase().as_str() {
            "knn" => Ok(AlgorithmKind::Knn),
            "gnb" | "gaussiannb" | "nb" => Ok(AlgorithmKind::GaussianNb),
            "lr" | "logisticregression" | "logreg" => Ok(AlgorithmKind::LogisticRegression),
            "svm" | "linearsvm" => Ok(AlgorithmKind::LinearSvm),
            "rf" | "randomforest" => Ok(AlgorithmKind::RandomForest),
            other => Err(Error::Validation(format!("unknown algorithm {other:?}"))),
        }
    }
}

/// Hyperparameters, one tagged variant per algorithm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "algorithm")]
pub enum AlgorithmConfig {
    #[serde(rename = "KNN")]
    Knn {
        #[serde(default = "defaults::knn_k")]
        k: usize,
    },
    #[serde(rename = "GaussianNB")]
    GaussianNb {
        #[serde(default = "defaults::gnb_var_smoothing")]
        var_smoothing: f64,
    },
    #[serde(rename = "LogisticRegression")]
    LogisticRegression {
        #[serde(default = "defaults::lr_learning_rate")]
        learning_rate: f64,
        #[serde(default = "defaults::lr_l2")]
        l2: f64,
        #[serde(default = "defaults::lr_max_iter")]
        max_iter: usize,
        #[serde(default = "defaults::lr_tol")]
        tol: f64,
    },
    #[serde(rename = "LinearSVM")]
    LinearSvm {
        #[serde(default = "defaults::svm_lambda")]
        lambda: f64,
        #[serde(default = "defaults::svm_epochs")]
        epochs: usize,
        #[serde(default = "defaults::shared_seed")]
        shuffle_seed: u64,
    },
    #[serde(rename = "RandomForest")]
    RandomForest {
        #[serde(default = "defaults::rf_n_estimators")]
        n_estimators: usize,
        /// `None` means unbounded depth.
        #[serde(default)]
        max_depth: Option<usize>,
        #[serde(default = "defaults::rf_min_samples_split")]
        min_samples_split: usize,
        #[serde(default = "defaults::rf_features_per_split")]
        features_per_split: usize,
        #[serde(default = "defaults::shared_seed")]
        rf_seed: u64,
    },
}

mod defaults {
    pub fn knn_k() -> usize {
        1
    }
    pub fn gnb_var_smoothing() -> f64 {
        1e-9
    }
    pub fn lr_learning_rate() -> f64 {
        0.1
    }
    pub fn lr_l2() -> f64 {
        1e-4
    }
    pub fn lr_max_iter() -> usize {
        1000
    }
    pub fn lr_tol() -> f64 {
        1e-6
    }
    pub fn svm_lambda() -> f64 {
        1e-3
    }
    pub fn svm_epochs() -> usize {
        50
    }
    pub fn rf_n_estimators() -> usize {
        6
    }
    pub fn rf_min_samples_split() -> usize {
        2
    }
    pub fn rf_features_per_split() -> usize {
        2
    }
    pub fn shared_seed() -> u64 {
        3
    }
}

impl AlgorithmConfig {
    pub fn default_for(kind: AlgorithmKind) -> AlgorithmConfig {
        match kind {
            AlgorithmKind::Knn => AlgorithmConfig::Knn { k: defaults::knn_k() },
            AlgorithmKind::GaussianNb => AlgorithmConfig::GaussianNb {
                var_smoothing: defaults::gnb_var_smoothing(),
            },
            AlgorithmKind::LogisticRegression => AlgorithmConfig::LogisticRegression {
                learning_rate: defaults::lr_learning_rate(),
                l2: defaults::lr_l2(),
                max_iter: defaults::lr_max_iter(),
                tol: defaults::lr_tol(),
            },
            AlgorithmKind::LinearSvm => AlgorithmConfig::LinearSvm {
                lambda: defaults::svm_lambda(),
                epochs: defaults::svm_epochs(),
                shuffle_seed: defaults::shared_seed(),
            },
            AlgorithmKind::RandomForest => AlgorithmConfig::RandomForest {
                n_estimators: defaults::rf_n_estimators(),
                max_depth: None,
                min_samples_split: defaults::rf_min_samples_split(),
                features_per_split: defaults::rf_features_per_split(),
                rf_seed: defaults::shared_seed(),
            },
        }
    }

    /// Default configs for the whole suite, in canonical order.
    pub fn suite_defaults() -> Vec<AlgorithmConfig> {
        AlgorithmKind::ALL.iter().map(|&k| AlgorithmConfig::default_for(k)).collect()
    }

    pub fn kind(&self) -> AlgorithmKind {
        match self {
            AlgorithmConfig::Knn { .. } => AlgorithmKind::Knn,
            AlgorithmConfig::GaussianNb { .. } => AlgorithmKind::GaussianNb,
            AlgorithmConfig::LogisticRegression { .. } => AlgorithmKind::LogisticRegression,
            AlgorithmConfig::LinearSvm { .. } => AlgorithmKind::LinearSvm,
            AlgorithmConfig::RandomForest { .. } => AlgorithmKind::RandomForest,
        }
    }

    pub fn name(&self) -> &'static str {
        self.kind().name()
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Validation(msg));
        match *self {
            AlgorithmConfig::Knn { k } => {
                if k == 0 {
                    return fail("KNN k must be positive".into());
                }
            }
            AlgorithmConfig::GaussianNb { var_smoothing } => {
                if !(var_smoothing > 0.0) || !var_smoothing.is_finite() {
                    return fail(format!("var_smoothing must be positive, got {var_smoothing}"));
                }
            }
            AlgorithmConfig::LogisticRegression { learning_rate, l2, max_iter, tol } => {
                if !(learning_rate >= 0.0) || !learning_rate.is_finite() {
                    return fail(format!("learning_rate must be nonnegative, got {learning_rate}"));
                }
                if !(l2 >= 0.0) || !l2.is_finite() {
                    return fail(format!("l2 must be nonnegative, got {l2}"));
                }
                if max_iter == 0 {
                    return fail("max_iter must be positive".into());
                }
                if !(tol > 0.0) {
                    return fail(format!("tol must be positive, got {tol}"));
                }
            }
            AlgorithmConfig::LinearSvm { lambda, .. } => {
                if !(lambda > 0.0) || !lambda.is_finite() {
                    return fail(format!("lambda must be positive, got {lambda}"));
                }
            }
            AlgorithmConfig::RandomForest {
                n_estimators,
                max_depth,
                min_samples_split,
                features_per_split,
                ..
            } => {
                if n_estimators == 0 {
                    return fail("n_estimators must be positive".into());
                }
                if max_depth == Some(0) {
                    return fail("max_depth must be positive or unbounded".into());
                }
                if min_samples_split < 2 {
                    return fail("min_samples_split must be at least 2".into());
                }
                if features_per_split == 0 || features_per_split > N_FEATURES {
                    return fail(format!(
                        "features_per_split must be in 1..={N_FEATURES}, got {features_per_split}"
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Fitted per-algorithm state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelState {
    Knn(knn::KnnState),
    GaussianNb(gnb::GnbState),
    LogisticRegression(logreg::LogRegState),
    LinearSvm(svm::SvmState),
    RandomForest(forest::ForestState),
}

/// An immutable fitted model: algorithm config, fitted state, the scaler
/// fitted on the training rows, and the ordered class list seen in training.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel {
    pub config: AlgorithmConfig,
    pub scaler: Scaler,
    /// Classes in order of first appearance in the training data. All tie
    /// breaks resolve toward the earliest entry.
    pub classes: Vec<Label>,
    pub state: ModelState,
}

/// Classes in order of first appearance.
pub fn class_list(labels: &[Label]) -> Vec<Label> {
    let mut seen = Vec::new();
    for &l in labels {
        if !seen.contains(&l) {
            seen.push(l);
        }
    }
    seen
}

/// Index of the largest score, ties toward the lowest index.
pub(crate) fn argmax(scores: &[f64]) -> usize {
    let mut best = 0;
    for (i, &s) in scores.iter().enumerate().skip(1) {
        if s > scores[best] {
            best = i;
        }
    }
    best
}

/// Majority class index from vote counts, ties toward the lowest index.
pub(crate) fn majority(counts: &[usize]) -> usize {
    let mut best = 0;
    for (i, &c) in counts.iter().enumerate().skip(1) {
        if c > counts[best] {
            best = i;
        }
    }
    best
}

/// Fits `config` on `train`.
///
/// The scaler is chosen per algorithm: min-max for KNN, z-score for
/// logistic regression and the SVM, identity for naive Bayes and the
/// forest. All stochastic steps run on splitmix64 chains seeded from the
/// config, so refitting with identical inputs yields an identical model.
pub fn fit(config: &AlgorithmConfig, train: &Dataset) -> Result<TrainedModel> {
    config.validate()?;
    if train.is_empty() {
        return Err(Error::Training("empty training set".into()));
    }
    let labels = train.labels();
    let classes = class_list(&labels);
    let targets: Vec<usize> = labels
        .iter()
        .map(|l| classes.iter().position(|c| c == l).unwrap())
        .collect();
    let raw = train.feature_matrix();
    let scaler = match config.kind() {
        AlgorithmKind::Knn => Scaler::fit_min_max(&raw),
        AlgorithmKind::LogisticRegression | AlgorithmKind::LinearSvm => Scaler::fit_z_score(&raw),
        AlgorithmKind::GaussianNb | AlgorithmKind::RandomForest => Scaler::fit_identity(),
    };
    let x = scaler.transform_all(&raw);
    let n_classes = classes.len();

    let state = match *config {
        AlgorithmConfig::Knn { k } => ModelState::Knn(knn::fit(x, targets, k)),
        AlgorithmConfig::GaussianNb { var_smoothing } => {
            ModelState::GaussianNb(gnb::fit(&x, &targets, n_classes, var_smoothing)?)
        }
        AlgorithmConfig::LogisticRegression { learning_rate, l2, max_iter, tol } => {
            ModelState::LogisticRegression(logreg::fit(
                &x,
                &targets,
                n_classes,
                learning_rate,
                l2,
                max_iter,
                tol,
            )?)
        }
        AlgorithmConfig::LinearSvm { lambda, epochs, shuffle_seed } => {
            ModelState::LinearSvm(svm::fit(&x, &targets, n_classes, lambda, epochs, shuffle_seed))
        }
        AlgorithmConfig::RandomForest {
            n_estimators,
            max_depth,
            min_samples_split,
            features_per_split,
            rf_seed,
        } => ModelState::RandomForest(forest::fit(
            &x,
            &targets,
            n_classes,
            n_estimators,
            max_depth,
            min_samples_split,
            features_per_split,
            rf_seed,
        )),
    };

    Ok(TrainedModel { config: config.clone(), scaler, classes, state })
}

impl TrainedModel {
    /// Predicts the label of one observation. Total over all feature
    /// values; the result is always a member of the trained class list.
    pub fn predict(&self, f: &FeatureVector) -> Label {
        let x = self.scaler.transform(&f.as_f64());
        let class_idx = match &self.state {
            ModelState::Knn(s) => knn::predict(s, &x),
            ModelState::GaussianNb(s) => gnb::predict(s, &x),
            ModelState::LogisticRegression(s) => logreg::predict(s, &x),
            ModelState::LinearSvm(s) => svm::predict(s, &x),
            ModelState::RandomForest(s) => forest::predict(s, &x),
        };
        self.classes[class_idx]
    }

    pub fn predict_batch(&self, data: &Dataset) -> Vec<Label> {
        data.rows().iter().map(|r| self.predict(&r.features)).collect()
    }

    /// Fraction of rows predicted correctly.
    pub fn accuracy_on(&self, data: &Dataset) -> f64 {
        if data.is_empty() {
            return 0.0;
        }
        let hits = data.rows().iter().filter(|r| self.predict(&r.features) == r.label).count();
        hits as f64 / data.len() as f64
    }

    /// Serializes to the versioned model document.
    pub fn to_json(&self) -> Result<String> {
        let doc = ModelDocument { version: MODEL_DOC_VERSION, model: self.clone() };
        let mut s = serde_json::to_string_pretty(&doc)?;
        s.push('\n');
        Ok(s)
    }

    /// Parses a versioned model document.
    pub fn from_json(text: &str) -> Result<TrainedModel> {
        let doc: ModelDocument = serde_json::from_str(text)?;
        if doc.version != MODEL_DOC_VERSION {
            return Err(Error::Validation(format!(
                "unsupported model document version {} (expected {MODEL_DOC_VERSION})",
                doc.version
            )));
        }
        Ok(doc.model)
    }
}

const MODEL_DOC_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct ModelDocument {
    version: u32,
    #[serde(flatten)]
    model: TrainedModel,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{GenConfig, Provenance};
    use crate::datagen::generate_dataset;

    fn toy_dataset() -> Dataset {
        let pairs = vec![
            (FeatureVector::new(0, 10, 20, 0), Label::NcVugs),
            (FeatureVector::new(1, 200, 85, 0), Label::Pore),
            (FeatureVector::new(1, 150, 30, 1), Label::Throat),
            (FeatureVector::new(0, 220, 50, 1), Label::Solid),
            (FeatureVector::new(0, 15, 25, 0), Label::NcVugs),
            (FeatureVector::new(1, 210, 88, 0), Label::Pore),
            (FeatureVector::new(1, 140, 35, 1), Label::Throat),
            (FeatureVector::new(0, 230, 55, 1), Label::Solid),
        ];
        Dataset::from_rows(pairs, Provenance::External)
    }

    #[test]
    fn class_list_keeps_first_appearance_order() {
        let labels = [Label::Pore, Label::Solid, Label::Pore, Label::NcVugs];
        assert_eq!(class_list(&labels), vec![Label::Pore, Label::Solid, Label::NcVugs]);
    }

    #[test]
    fn empty_training_set_is_rejected() {
        let d = Dataset::from_rows(vec![], Provenance::External);
        for cfg in AlgorithmConfig::suite_defaults() {
            assert!(fit(&cfg, &d).is_err(), "{} accepted empty train", cfg.name());
        }
    }

    #[test]
    fn single_row_training_set_is_allowed() {
        let d = Dataset::from_rows(
            vec![(FeatureVector::new(0, 100, 50, 1), Label::Solid)],
            Provenance::External,
        );
        for cfg in AlgorithmConfig::suite_defaults() {
            let m = fit(&cfg, &d).unwrap_or_else(|e| panic!("{}: {e}", cfg.name()));
            assert_eq!(m.predict(&FeatureVector::new(1, 9, 9, 0)), Label::Solid);
        }
    }

    #[test]
    fn predictions_stay_in_the_trained_class_list() {
        let cfg = GenConfig { n_samples: 300, ..GenConfig::default() };
        let data = generate_dataset(&cfg).unwrap();
        let queries = [
            FeatureVector::new(0, -50, 500, 1),
            FeatureVector::new(1, 999, -20, 0),
            FeatureVector::new(0, 0, 0, 0),
        ];
        for algo in AlgorithmConfig::suite_defaults() {
            let m = fit(&algo, &data).unwrap();
            for q in &queries {
                assert!(m.classes.contains(&m.predict(q)));
            }
        }
    }

    #[test]
    fn fit_is_deterministic_for_every_algorithm() {
        let cfg = GenConfig { n_samples: 200, ..GenConfig::default() };
        let data = generate_dataset(&cfg).unwrap();
        for algo in AlgorithmConfig::suite_defaults() {
            let a = fit(&algo, &data).unwrap();
            let b = fit(&algo, &data).unwrap();
            assert_eq!(a, b, "{} not deterministic", algo.name());
        }
    }

    #[test]
    fn model_json_round_trip_preserves_predictions() {
        let data = toy_dataset();
        let queries = generate_dataset(&GenConfig { n_samples: 50, ..GenConfig::default() }).unwrap();
        for algo in AlgorithmConfig::suite_defaults() {
            let m = fit(&algo, &data).unwrap();
            let text = m.to_json().unwrap();
            let back = TrainedModel::from_json(&text).unwrap();
            assert_eq!(back, m, "{} state changed in round trip", algo.name());
            for row in queries.rows() {
                assert_eq!(back.predict(&row.features), m.predict(&row.features));
            }
        }
    }

    #[test]
    fn model_json_rejects_unknown_version() {
        let data = toy_dataset();
        let m = fit(&AlgorithmConfig::default_for(AlgorithmKind::Knn), &data).unwrap();
        let text = m.to_json().unwrap().replace("\"version\": 1", "\"version\": 9");
        assert!(TrainedModel::from_json(&text).is_err());
    }

    #[test]
    fn config_validation_catches_bad_values() {
        assert!(AlgorithmConfig::Knn { k: 0 }.validate().is_err());
        assert!(AlgorithmConfig::GaussianNb { var_smoothing: 0.0 }.validate().is_err());
        assert!(AlgorithmConfig::RandomForest {
            n_estimators: 3,
            max_depth: None,
            min_samples_split: 2,
            features_per_split: 5,
            rf_seed: 0,
        }
        .validate()
        .is_err());
    }
}
