//! Severity classification of chest CT scans from lung-side infection rates.
//!
//! A scan is a directory of grayscale slice images. The pipeline:
//!
//! - [`lung`]: load scans, obtain lung masks, gate slices;
//! - [`infection`]: segment infection inside the lung on each retained slice;
//! - [`features`]: condense per-slice left/right rates into 80 features;
//! - [`classifiers`]: ERT, gradient boosting, SVM, k-NN, logistic
//!   regression and a hard-voting ensemble;
//! - [`wam`]: the rule-based weighted average baseline;
//! - [`eval`]: confusion matrices, macro metrics and stratified splits;
//! - [`phantom`]: synthetic scans with known ground truth.
//!
//! [`commands`] and [`config`] back the `ctsev` binary. Runnable examples
//! live under `examples/`: `phantom_scan`, `segment_slice`, `lung_gate`,
//! `feature_vector`, `wam_baseline`, `train_classifiers`, `evaluate_holdout`,
//! `model_roundtrip` and `imaging_ops`.

pub mod classifiers;
pub mod commands;
pub mod config;
pub mod error;
pub mod eval;
pub mod features;
pub mod imaging;
pub mod infection;
pub mod lung;
pub mod phantom;
pub mod wam;

pub use error::{Error, Result};
