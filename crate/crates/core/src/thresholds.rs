//! Similarity-score bands for models that emit one cosine similarity per
//! sentence pair.
//!
//! Training targets are 0, 0.5 and 1 for less / equally / more likely. At
//! evaluation time the score line is cut at 1/3 and 2/3 into the half-open
//! bands `(-inf, 1/3)`, `[1/3, 2/3)` and `[2/3, inf)`. Scores outside
//! `[0, 1]` are legal and land in the outer bands.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::predictions::{ModelOutput, PredictionKind, PredictionSet};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ThresholdSpec {
    pub lower: f64,
    pub upper: f64,
    /// Regression target per class, strictly increasing.
    pub targets: Vec<f64>,
}

impl Default for ThresholdSpec {
    fn default() -> Self {
        Self {
            lower: 1.0 / 3.0,
            upper: 2.0 / 3.0,
            targets: vec![0.0, 0.5, 1.0],
        }
    }
}

impl ThresholdSpec {
    pub fn new(lower: f64, upper: f64, targets: Vec<f64>) -> Result<Self> {
        let spec = Self { lower, upper, targets };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_cuts(lower: f64, upper: f64) -> Result<Self> {
        Self::new(lower, upper, Self::default().targets)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lower.is_finite() && self.upper.is_finite() && self.lower < self.upper) {
            return Err(Error::InvalidConfig(format!(
                "thresholds need lower < upper, got {} / {}",
                self.lower, self.upper
            )));
        }
        if self.targets.len() != 3 {
            return Err(Error::InvalidConfig(format!(
                "expected 3 class targets, got {}",
                self.targets.len()
            )));
        }
        if !self.targets.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidConfig("class targets must be strictly increasing".into()));
        }
        if !self.targets.iter().all(|t| (-1.0..=1.0).contains(t)) {
            return Err(Error::InvalidConfig(
                "class targets must be valid cosine similarities".into(),
            ));
        }
        Ok(())
    }
}

pub fn score_to_label(score: f64, spec: &ThresholdSpec) -> Result<usize> {
    if !score.is_finite() {
        return Err(Error::NonFiniteScore(score));
    }
    Ok(if score < spec.lower {
        0
    } else if score < spec.upper {
        1
    } else {
        2
    })
}

pub fn label_to_target(label: usize, spec: &ThresholdSpec) -> Result<f64> {
    spec.targets.get(label).copied().ok_or(Error::LabelOutOfRange {
        label,
        classes: spec.targets.len(),
    })
}

pub fn scores_to_labels(scores: &[f64], spec: &ThresholdSpec) -> Result<Vec<usize>> {
    scores.iter().map(|&s| score_to_label(s, spec)).collect()
}

pub fn labels_from_scores(preds: &PredictionSet, spec: &ThresholdSpec) -> Result<Vec<usize>> {
    if preds.kind != PredictionKind::Scalar {
        return Err(Error::WrongKind(
            "threshold mapping needs scalar similarity scores".into(),
        ));
    }
    preds
        .records
        .iter()
        .map(|r| match r.output {
            ModelOutput::Score(s) => score_to_label(s, spec),
            ModelOutput::Probs(_) => unreachable!("kind validated at load"),
        })
        .collect()
}
