//! Browser bindings for the demo page in `www/`.
//!
//! Every export takes plain numbers and returns JSON text, so the page needs
//! no generated type glue beyond `JSON.parse`. The plain-Rust functions
//! behind the exports are public for native testing.

use crossbal::baselines::{fit_majority, predict_majority};
use crossbal::cross_balance::{window_offsets, CrossBalancePlan};
use crossbal::dataset::{DatasetSplit, LabelSchema, SentencePair};
use crossbal::evaluation::{evaluate, EvaluationSettings, ModeSelection};
use crossbal::report::{cross_balanced_heatmap, heatmap, EvalMode, HeatmapTable};
use crossbal::thresholds::{score_to_label, ThresholdSpec};
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Largest class size the page accepts; keeps window listings readable.
pub const MAX_CLASS_SIZE: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlanView {
    pub s: usize,
    pub r: usize,
    /// `windows[i][c]`: offsets within class `c` used by iteration `i`.
    pub windows: Vec<Vec<Vec<usize>>>,
    /// `usage[c][k]`: how often offset `k` of class `c` is evaluated.
    pub usage: Vec<Vec<usize>>,
}

pub fn plan_view(sizes: &[usize]) -> Result<PlanView, String> {
    if sizes.len() < 2 {
        return Err("need at least two classes".into());
    }
    if let Some(&n) = sizes.iter().find(|&&n| n > MAX_CLASS_SIZE) {
        return Err(format!("class size {n} exceeds {MAX_CLASS_SIZE}"));
    }
    let labels: Vec<usize> = sizes
        .iter()
        .enumerate()
        .flat_map(|(c, &n)| std::iter::repeat_n(c, n))
        .collect();
    let plan = CrossBalancePlan::from_labels(&labels, sizes.len()).map_err(|e| e.to_string())?;
    let windows: Vec<Vec<Vec<usize>>> = (0..plan.r)
        .map(|i| sizes.iter().map(|&n| window_offsets(n, plan.s, i).collect()).collect())
        .collect();
    let mut usage: Vec<Vec<usize>> = sizes.iter().map(|&n| vec![0; n]).collect();
    for iteration in &windows {
        for (c, offsets) in iteration.iter().enumerate() {
            for &k in offsets {
                usage[c][k] += 1;
            }
        }
    }
    Ok(PlanView {
        s: plan.s,
        r: plan.r,
        windows,
        usage,
    })
}

pub fn bands(scores: &[f64], lower: f64, upper: f64) -> Result<Vec<usize>, String> {
    let spec = ThresholdSpec::with_cuts(lower, upper).map_err(|e| e.to_string())?;
    scores
        .iter()
        .map(|&s| score_to_label(s, &spec).map_err(|e| e.to_string()))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegimeView {
    pub accuracy: f64,
    pub f1_macro: f64,
    pub heatmap: HeatmapTable,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MajorityView {
    pub majority_class: usize,
    pub labels: Vec<String>,
    pub standard: RegimeView,
    pub cross_balanced: RegimeView,
    pub s: usize,
    pub r: usize,
}

fn synthetic_split(name: &str, counts: &[usize]) -> DatasetSplit {
    let records = counts
        .iter()
        .enumerate()
        .flat_map(|(c, &n)| std::iter::repeat_n(c, n))
        .enumerate()
        .map(|(i, label)| SentencePair {
            id: format!("{name}-{i}"),
            sentence1: format!("item {i}"),
            sentence2: format!("modified item {i}"),
            modifier: "modified".into(),
            label,
        })
        .collect();
    DatasetSplit::new(name, LabelSchema::Adapted, records)
}

/// Majority-baseline metrics under both regimes for 3-class train and eval
/// class counts.
pub fn majority_view(train_counts: &[usize], eval_counts: &[usize]) -> Result<MajorityView, String> {
    let classes = LabelSchema::Adapted.num_classes();
    if train_counts.len() != classes || eval_counts.len() != classes {
        return Err(format!("expected {classes} class counts"));
    }
    if eval_counts.iter().any(|&n| n > MAX_CLASS_SIZE) || train_counts.iter().any(|&n| n > MAX_CLASS_SIZE) {
        return Err(format!("class counts are limited to {MAX_CLASS_SIZE}"));
    }
    let train = synthetic_split("train", train_counts);
    let eval = synthetic_split("dev", eval_counts);
    let model = fit_majority(&train).map_err(|e| e.to_string())?;
    let preds = predict_majority(&model, &eval);
    let record =
        evaluate(&eval, &preds, ModeSelection::Both, &EvaluationSettings::default()).map_err(|e| e.to_string())?;
    let (Some(standard), Some(cross)) = (&record.standard, &record.cross_balanced) else {
        return Err("evaluation produced no result".into());
    };
    let regime = |mode: EvalMode, table: HeatmapTable| -> Result<RegimeView, String> {
        let b = record.bundle(mode).ok_or("missing bundle")?;
        Ok(RegimeView {
            accuracy: b.accuracy,
            f1_macro: b.f1_macro,
            heatmap: table,
        })
    };
    Ok(MajorityView {
        majority_class: model.majority_class,
        labels: record.labels.clone(),
        standard: regime(
            EvalMode::Standard,
            heatmap(&standard.confusion, &record.labels).map_err(|e| e.to_string())?,
        )?,
        cross_balanced: regime(
            EvalMode::CrossBalanced,
            cross_balanced_heatmap(cross, &record.labels).map_err(|e| e.to_string())?,
        )?,
        s: cross.plan.s,
        r: cross.plan.r,
    })
}

fn to_js<T: Serialize>(value: Result<T, String>) -> Result<String, JsError> {
    let value = value.map_err(|e| JsError::new(&e))?;
    serde_json::to_string(&value).map_err(|e| JsError::new(&e.to_string()))
}

fn sizes(values: &[u32]) -> Vec<usize> {
    values.iter().map(|&v| v as usize).collect()
}

#[wasm_bindgen(js_name = crossBalancePlan)]
pub fn cross_balance_plan(class_sizes: &[u32]) -> Result<String, JsError> {
    to_js(plan_view(&sizes(class_sizes)))
}

#[wasm_bindgen(js_name = thresholdBands)]
pub fn threshold_bands(scores: &[f64], lower: f64, upper: f64) -> Result<String, JsError> {
    to_js(bands(scores, lower, upper))
}

#[wasm_bindgen(js_name = majorityBaseline)]
pub fn majority_baseline(train_counts: &[u32], eval_counts: &[u32]) -> Result<String, JsError> {
    to_js(majority_view(&sizes(train_counts), &sizes(eval_counts)))
}
