//! Evaluation harness for multi-class sentence-pair classification under
//! class imbalance.
//!
//! The pipeline: load a dataset split ([`dataset`]), load model outputs
//! ([`predictions`]), turn scalar similarity scores into labels
//! ([`thresholds`]), score them ([`metrics`]) either in one pass or with
//! class-balanced sliding windows ([`cross_balance`]), rank models across
//! seeds with Almost Stochastic Order tests ([`significance`]) and render
//! tables ([`report`]). [`baselines`] provides reference predictors.

pub mod baselines;
pub mod cross_balance;
pub mod dataset;
pub mod error;
pub mod evaluation;
pub mod metrics;
pub mod predictions;
pub mod report;
pub mod rng;
pub mod significance;
pub mod thresholds;

pub use error::{Error, Result};
