//! Credit-scoring toolkit.
//!
//! The crate models the accept/reject decision for loan applicants as a
//! binary good/bad classification problem and provides the full modelling
//! pipeline around it:
//!
//! - [`dataset`]: schema-checked datasets, CSV ingestion with a plain-text
//!   schema sidecar, and stratified fold assignment.
//! - [`discretize`]: entropy-based multi-interval (MDLP) discretization of
//!   numeric features.
//! - [`rank`]: chi-squared / information-gain feature ranking and the
//!   leakage-free pipeline (discretize, select, classify, threshold).
//! - [`classifiers`]: six probabilistic candidate models behind one scoring
//!   contract.
//! - [`imbalance`]: F1-optimizing and cost-ratio decision thresholds, plus
//!   SMOTE oversampling.
//! - [`evaluate`]: confusion-matrix metrics, ROC/AUC, cross-validation, and
//!   the feature-count / cost-ratio sweep harnesses.
//! - [`scorecard`]: weight-of-evidence tables and reports.
//! - [`synth`]: a seeded synthetic-data generator with the two-group
//!   (application form / bank statement) feature structure and a 7401:121
//!   class imbalance by default.
//! - [`persist`]: a versioned, checksummed, line-oriented text format for
//!   fitted pipelines.
//!
//! All randomness flows from a single master seed through
//! [`seed::derive_seed`], so every fit, fold split, and sweep is
//! reproducible byte for byte.

pub mod classifiers;
pub mod dataset;
pub mod discretize;
pub mod error;
pub mod evaluate;
pub mod imbalance;
pub mod persist;
pub mod rank;
pub mod scorecard;
pub mod seed;
pub mod synth;

pub use error::{DataError, ModelError};
