//! Deterministic classifier benchmark on synthetic heterogeneous
//! micropore data.
//!
//! The crate generates a labeled synthetic dataset mimicking micropore
//! image features, trains five from-scratch classifiers on it behind one
//! fit/predict interface, and runs benchmark, hyperparameter-optimization,
//! and sweep harnesses over them. Every stage is seeded and bit-exact:
//! rerunning any pipeline with the same inputs reproduces the same CSV,
//! JSON, and SVG bytes.
//!
//! ## Examples
//!
//! One runnable example per capability:
//!
//! ```bash
//! cargo run -p porebench --example generate_dataset     # seeded data + CSV
//! cargo run -p porebench --example label_rows           # the expert rule set
//! cargo run -p porebench --example run_benchmark        # five-algorithm report
//! cargo run -p porebench --example tune_random_forest   # optimization loop
//! cargo run -p porebench --example sweep_split_ratios   # test-size sweep
//! cargo run -p porebench --example sweep_sample_sizes   # dataset-size sweep
//! cargo run -p porebench --example plot_charts          # SVG emitters
//! cargo run -p porebench --example save_load_model      # model documents
//! ```
//!
//! The same capabilities are scriptable through the thin `porebench`
//! binary (`generate`, `label`, `benchmark`, `optimize`, `sweep-split`,
//! `sweep-samples`, `plot`).
//!
//! ## Quick start
//!
//! ```
//! use porebench::data::GenConfig;
//! use porebench::datagen::generate_dataset;
//! use porebench::classify::AlgorithmConfig;
//! use porebench::eval::{benchmark, SplitConfig};
//!
//! let data = generate_dataset(&GenConfig { n_samples: 200, ..GenConfig::default() }).unwrap();
//! let report = benchmark(&data, &SplitConfig::default(), &AlgorithmConfig::suite_defaults()).unwrap();
//! assert_eq!(report.entries.len(), 5);
//! ```

pub mod classify;
pub mod cli;
pub mod csvio;
pub mod data;
pub mod datagen;
pub mod error;
pub mod eval;
pub mod rng;
pub mod runconfig;
pub mod scale;
pub mod svg;
pub mod tune;
pub mod util;

pub use classify::{fit, AlgorithmConfig, AlgorithmKind, TrainedModel};
pub use data::{Dataset, FeatureVector, GenConfig, Label};
pub use datagen::{generate_dataset, label_rule};
pub use error::{Error, Result};
pub use eval::{benchmark, Metrics, Report, SplitConfig};
pub use tune::{optimize, SearchSpace, TuneResult};
