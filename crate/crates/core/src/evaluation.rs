//! One model run on one split, evaluated under either or both regimes.
//!
//! [`EvaluationRecord`] is the machine-readable result written by the CLI and
//! consumed by `compare` and `report`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::cross_balance::{average_bundles, evaluate_cross_balanced, CrossBalanceOptions, CrossBalancedResult};
use crate::dataset::DatasetSplit;
use crate::error::{Error, Result};
use crate::metrics::{evaluate_standard, Instances, Metric, MetricsBundle, StandardResult};
use crate::predictions::{align, PredictionKind, PredictionSet};
use crate::report::{row_key, EvalMode};
use crate::thresholds::ThresholdSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeSelection {
    Standard,
    CrossBalanced,
    Both,
}

impl ModeSelection {
    pub fn includes(self, mode: EvalMode) -> bool {
        matches!(
            (self, mode),
            (ModeSelection::Both, _)
                | (ModeSelection::Standard, EvalMode::Standard)
                | (ModeSelection::CrossBalanced, EvalMode::CrossBalanced)
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationRecord {
    pub model_name: String,
    pub seed: u64,
    /// Training setup label, e.g. `bal` or `full`.
    #[serde(default)]
    pub train_setup: String,
    pub kind: PredictionKind,
    pub split: String,
    pub labels: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub standard: Option<StandardResult>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cross_balanced: Option<CrossBalancedResult>,
}

impl EvaluationRecord {
    pub fn row_key(&self) -> String {
        row_key(&self.model_name, &self.train_setup)
    }

    pub fn bundle(&self, mode: EvalMode) -> Option<&MetricsBundle> {
        match mode {
            EvalMode::Standard => self.standard.as_ref().map(|s| &s.bundle),
            EvalMode::CrossBalanced => self.cross_balanced.as_ref().map(|c| &c.mean_bundle),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct EvaluationSettings {
    pub thresholds: ThresholdSpec,
    pub cross_balance: CrossBalanceOptions,
    pub train_setup: String,
}

pub fn evaluate(
    split: &DatasetSplit,
    preds: &PredictionSet,
    mode: ModeSelection,
    settings: &EvaluationSettings,
) -> Result<EvaluationRecord> {
    settings.thresholds.validate()?;
    let aligned = align(preds, split)?;
    let instances = Instances::from_aligned(&aligned, split.schema.num_classes(), &settings.thresholds)?;
    if instances.is_empty() {
        return Err(Error::NoInstances);
    }
    if preds.kind == PredictionKind::Scalar {
        log::info!("{}: scalar scores, ROC-AUC not reported", preds.model_name);
    }
    let standard = if mode.includes(EvalMode::Standard) {
        Some(evaluate_standard(&instances)?)
    } else {
        None
    };
    let cross_balanced = if mode.includes(EvalMode::CrossBalanced) {
        Some(evaluate_cross_balanced(&instances, settings.cross_balance)?)
    } else {
        None
    };
    Ok(EvaluationRecord {
        model_name: preds.model_name.clone(),
        seed: preds.seed,
        train_setup: settings.train_setup.clone(),
        kind: preds.kind,
        split: split.name.clone(),
        labels: split.schema.labels().iter().map(|s| s.to_string()).collect(),
        standard,
        cross_balanced,
    })
}

/// Records grouped by table row (`model-train`), in first-seen order.
pub fn group_by_row(records: &[EvaluationRecord]) -> Vec<(String, Vec<&EvaluationRecord>)> {
    let mut order: Vec<String> = Vec::new();
    let mut groups: BTreeMap<String, Vec<&EvaluationRecord>> = BTreeMap::new();
    for r in records {
        let key = r.row_key();
        if !groups.contains_key(&key) {
            order.push(key.clone());
        }
        groups.entry(key).or_default().push(r);
    }
    order
        .into_iter()
        .map(|k| {
            let v = groups.remove(&k).unwrap_or_default();
            (k, v)
        })
        .collect()
}

/// Per-seed values of one metric under one regime, `None` when any record
/// lacks it.
pub fn seed_scores(records: &[&EvaluationRecord], mode: EvalMode, metric: Metric) -> Option<Vec<f64>> {
    records
        .iter()
        .map(|r| r.bundle(mode).and_then(|b| b.metric(metric)))
        .collect()
}

/// Mean bundle over seeds for one regime.
pub fn seed_average(records: &[&EvaluationRecord], mode: EvalMode) -> Option<MetricsBundle> {
    let bundles: Option<Vec<&MetricsBundle>> = records.iter().map(|r| r.bundle(mode)).collect();
    bundles.and_then(|b| average_bundles(&b).ok())
}
