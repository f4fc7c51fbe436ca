//! Confusion matrices, accuracy, per-class and macro F1, and one-vs-rest
//! macro ROC-AUC.
//!
//! Any 0/0 precision, recall or F1 term is 0. F1-macro averages over all K
//! classes; ROC-AUC averages only over classes present in gold, because a
//! class without positives has no AUC.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::predictions::{argmax, AlignedPredictions, Outputs};
use crate::thresholds::{scores_to_labels, ThresholdSpec};

/// Rows are gold classes, columns predicted classes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub classes: usize,
    pub counts: Vec<Vec<usize>>,
}

impl ConfusionMatrix {
    pub fn zeros(classes: usize) -> Self {
        Self {
            classes,
            counts: vec![vec![0; classes]; classes],
        }
    }

    pub fn total(&self) -> usize {
        self.counts.iter().flatten().sum()
    }

    pub fn trace(&self) -> usize {
        (0..self.classes).map(|c| self.counts[c][c]).sum()
    }

    pub fn row_sum(&self, gold: usize) -> usize {
        self.counts[gold].iter().sum()
    }

    pub fn col_sum(&self, predicted: usize) -> usize {
        self.counts.iter().map(|row| row[predicted]).sum()
    }
}

fn check_labels(labels: &[usize], classes: usize) -> Result<()> {
    match labels.iter().find(|&&l| l >= classes) {
        Some(&label) => Err(Error::LabelOutOfRange { label, classes }),
        None => Ok(()),
    }
}

pub fn confusion(gold: &[usize], pred: &[usize], classes: usize) -> Result<ConfusionMatrix> {
    if gold.len() != pred.len() {
        return Err(Error::LengthMismatch {
            left: gold.len(),
            right: pred.len(),
        });
    }
    check_labels(gold, classes)?;
    check_labels(pred, classes)?;
    let mut cm = ConfusionMatrix::zeros(classes);
    for (&g, &p) in gold.iter().zip(pred) {
        cm.counts[g][p] += 1;
    }
    Ok(cm)
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

pub fn accuracy(cm: &ConfusionMatrix) -> Result<f64> {
    match cm.total() {
        0 => Err(Error::NoInstances),
        total => Ok(cm.trace() as f64 / total as f64),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassScores {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

pub fn f1_score(precision: f64, recall: f64) -> f64 {
    if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    }
}

pub fn per_class(cm: &ConfusionMatrix) -> Vec<ClassScores> {
    (0..cm.classes)
        .map(|c| {
            let tp = cm.counts[c][c];
            let precision = ratio(tp, cm.col_sum(c));
            let recall = ratio(tp, cm.row_sum(c));
            ClassScores {
                precision,
                recall,
                f1: f1_score(precision, recall),
            }
        })
        .collect()
}

pub fn f1_macro(cm: &ConfusionMatrix) -> Result<f64> {
    if cm.total() == 0 {
        return Err(Error::NoInstances);
    }
    let scores = per_class(cm);
    Ok(scores.iter().map(|s| s.f1).sum::<f64>() / cm.classes as f64)
}

/// Mann–Whitney AUC of `scores` separating `positive` from the rest, with
/// tied pairs counted as 1/2. `None` when either side is empty.
pub fn binary_auc(scores: &[f64], positive: &[bool]) -> Option<f64> {
    let n_pos = positive.iter().filter(|&&p| p).count();
    let n_neg = positive.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return None;
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));

    // Midranks (1-based) summed over positives.
    let mut rank_sum = 0.0;
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && scores[order[end]] == scores[order[start]] {
            end += 1;
        }
        let midrank = (start + 1 + end) as f64 / 2.0;
        let tied_pos = order[start..end].iter().filter(|&&i| positive[i]).count();
        rank_sum += midrank * tied_pos as f64;
        start = end;
    }
    let u = rank_sum - (n_pos * (n_pos + 1)) as f64 / 2.0;
    Some(u / (n_pos as f64 * n_neg as f64))
}

pub fn roc_auc_ovr_macro(gold: &[usize], probs: &[Vec<f64>]) -> Result<f64> {
    if gold.len() != probs.len() {
        return Err(Error::LengthMismatch {
            left: gold.len(),
            right: probs.len(),
        });
    }
    let classes = probs.first().map_or(0, Vec::len);
    check_labels(gold, classes)?;
    let mut total = 0.0;
    let mut present = 0usize;
    for c in 0..classes {
        let scores: Vec<f64> = probs.iter().map(|p| p[c]).collect();
        let positive: Vec<bool> = gold.iter().map(|&g| g == c).collect();
        if !positive.contains(&true) {
            continue;
        }
        match binary_auc(&scores, &positive) {
            Some(auc) => {
                total += auc;
                present += 1;
            }
            None => return Err(Error::SingleClass),
        }
    }
    if present < 2 {
        return Err(Error::SingleClass);
    }
    Ok(total / present as f64)
}

/// Gold labels, decoded predictions and, for probabilistic models, the
/// class-probability vectors used for ROC-AUC.
#[derive(Debug, Clone, PartialEq)]
pub struct Instances {
    pub classes: usize,
    pub ids: Vec<String>,
    pub gold: Vec<usize>,
    pub predicted: Vec<usize>,
    pub probs: Option<Vec<Vec<f64>>>,
}

impl Instances {
    /// Decodes aligned predictions: argmax for probability vectors (ties to
    /// the lowest class), thresholds for scalar scores. Constant predictors
    /// keep their hard labels but drop the probabilities.
    pub fn from_aligned(aligned: &AlignedPredictions, classes: usize, spec: &ThresholdSpec) -> Result<Self> {
        let (predicted, probs) = match &aligned.outputs {
            Outputs::Probabilities(p) => {
                let labels = p.iter().map(|v| argmax(v)).collect();
                (labels, (!aligned.constant).then(|| p.clone()))
            }
            Outputs::Scores(s) => (scores_to_labels(s, spec)?, None),
        };
        check_labels(&predicted, classes)?;
        Ok(Self {
            classes,
            ids: aligned.ids.clone(),
            gold: aligned.gold.clone(),
            predicted,
            probs,
        })
    }

    /// Hard-label instances with synthetic ids.
    pub fn from_labels(gold: Vec<usize>, predicted: Vec<usize>, classes: usize) -> Self {
        let ids = (0..gold.len()).map(|i| i.to_string()).collect();
        Self {
            classes,
            ids,
            gold,
            predicted,
            probs: None,
        }
    }

    pub fn len(&self) -> usize {
        self.gold.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gold.is_empty()
    }

    pub fn subset(&self, positions: &[usize]) -> Self {
        Self {
            classes: self.classes,
            ids: positions.iter().map(|&i| self.ids[i].clone()).collect(),
            gold: positions.iter().map(|&i| self.gold[i]).collect(),
            predicted: positions.iter().map(|&i| self.predicted[i]).collect(),
            probs: self
                .probs
                .as_ref()
                .map(|p| positions.iter().map(|&i| p[i].clone()).collect()),
        }
    }

    pub fn confusion(&self) -> Result<ConfusionMatrix> {
        confusion(&self.gold, &self.predicted, self.classes)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsBundle {
    pub n: usize,
    pub accuracy: f64,
    pub f1_macro: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub roc_auc: Option<f64>,
    pub per_class: Vec<ClassScores>,
}

impl MetricsBundle {
    pub fn metric(&self, name: Metric) -> Option<f64> {
        match name {
            Metric::F1Macro => Some(self.f1_macro),
            Metric::Accuracy => Some(self.accuracy),
            Metric::RocAuc => self.roc_auc,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    F1Macro,
    RocAuc,
    Accuracy,
}

impl Metric {
    pub const ALL: [Metric; 3] = [Metric::F1Macro, Metric::RocAuc, Metric::Accuracy];

    pub fn name(self) -> &'static str {
        match self {
            Metric::F1Macro => "f1_macro",
            Metric::RocAuc => "roc_auc",
            Metric::Accuracy => "accuracy",
        }
    }

    pub fn title(self) -> &'static str {
        match self {
            Metric::F1Macro => "F1-macro",
            Metric::RocAuc => "ROC-AUC",
            Metric::Accuracy => "Acc",
        }
    }
}

impl std::str::FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Metric::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown metric {s:?}")))
    }
}

/// All metrics applicable to the instances. ROC-AUC is present only for
/// informative probability vectors over at least two gold classes.
pub fn bundle(instances: &Instances) -> Result<MetricsBundle> {
    let cm = instances.confusion()?;
    bundle_from(&cm, instances)
}

pub(crate) fn bundle_from(cm: &ConfusionMatrix, instances: &Instances) -> Result<MetricsBundle> {
    let roc_auc = match &instances.probs {
        Some(p) => match roc_auc_ovr_macro(&instances.gold, p) {
            Ok(auc) => Some(auc),
            Err(Error::SingleClass) => {
                log::warn!("ROC-AUC undefined: fewer than two gold classes present");
                None
            }
            Err(e) => return Err(e),
        },
        None => None,
    };
    Ok(MetricsBundle {
        n: cm.total(),
        accuracy: accuracy(cm)?,
        f1_macro: f1_macro(cm)?,
        roc_auc,
        per_class: per_class(cm),
    })
}

/// Single pass over the whole split.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StandardResult {
    pub bundle: MetricsBundle,
    pub confusion: ConfusionMatrix,
}

pub fn evaluate_standard(instances: &Instances) -> Result<StandardResult> {
    let confusion = instances.confusion()?;
    let bundle = bundle_from(&confusion, instances)?;
    Ok(StandardResult { bundle, confusion })
}
