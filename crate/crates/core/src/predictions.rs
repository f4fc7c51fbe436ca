//! Model-output wire format.
//!
//! A prediction file is line-delimited JSON. The first line is a header:
//!
//! ```text
//! {"model_name":"roberta-bal","seed":17,"kind":"probabilistic"}
//! ```
//!
//! followed by one record per instance, either
//! `{"id":"dev-1","gold":1,"probs":[0.1,0.7,0.2]}` (probabilistic) or
//! `{"id":"dev-1","gold":1,"score":0.42}` (scalar similarity). The header may
//! also carry `"constant":true` for degenerate predictors whose scores carry
//! no ranking information; ROC-AUC is then reported as absent.

use std::collections::{HashMap, HashSet};
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::dataset::DatasetSplit;
use crate::error::{Error, Result};

const DISTRIBUTION_TOLERANCE: f64 = 1e-6;
const MAX_LISTED_OFFENDERS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PredictionKind {
    Probabilistic,
    Scalar,
}

impl std::fmt::Display for PredictionKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            PredictionKind::Probabilistic => "probabilistic",
            PredictionKind::Scalar => "scalar",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ModelOutput {
    Probs(Vec<f64>),
    Score(f64),
}

impl ModelOutput {
    pub fn kind(&self) -> PredictionKind {
        match self {
            ModelOutput::Probs(_) => PredictionKind::Probabilistic,
            ModelOutput::Score(_) => PredictionKind::Scalar,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PredictionRecord {
    pub id: String,
    pub gold: usize,
    pub output: ModelOutput,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PredictionSet {
    pub model_name: String,
    pub seed: u64,
    pub kind: PredictionKind,
    /// Set for predictors that emit the same output for every instance.
    pub constant: bool,
    pub records: Vec<PredictionRecord>,
}

impl PredictionSet {
    pub fn new(model_name: impl Into<String>, seed: u64, kind: PredictionKind) -> Self {
        Self {
            model_name: model_name.into(),
            seed,
            kind,
            constant: false,
            records: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct Header {
    model_name: String,
    seed: u64,
    kind: PredictionKind,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    constant: bool,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WireRecord {
    id: String,
    gold: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    probs: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    score: Option<f64>,
}

fn is_distribution(probs: &[f64]) -> bool {
    !probs.is_empty()
        && probs.iter().all(|p| p.is_finite() && *p >= 0.0)
        && (probs.iter().sum::<f64>() - 1.0).abs() <= DISTRIBUTION_TOLERANCE
}

pub fn load_predictions<R: BufRead>(reader: R) -> Result<PredictionSet> {
    let mut lines = reader
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| !matches!(l, Ok(s) if s.trim().is_empty()));

    let (_, header_line) = lines.next().ok_or(Error::Parse {
        line: 1,
        message: "missing header line".into(),
    })?;
    let header: Header = serde_json::from_str(&header_line?).map_err(|e| Error::Parse {
        line: 1,
        message: format!("bad header: {e}"),
    })?;

    let mut set = PredictionSet {
        model_name: header.model_name,
        seed: header.seed,
        kind: header.kind,
        constant: header.constant,
        records: Vec::new(),
    };
    let mut seen = HashSet::new();
    let mut width: Option<usize> = None;

    for (lineno, line) in lines {
        let wire: WireRecord = serde_json::from_str(&line?).map_err(|e| Error::Parse {
            line: lineno,
            message: e.to_string(),
        })?;
        let output = match (wire.probs, wire.score) {
            (Some(p), None) => ModelOutput::Probs(p),
            (None, Some(s)) => ModelOutput::Score(s),
            _ => {
                return Err(Error::InvalidRecord {
                    id: wire.id,
                    reason: "exactly one of `probs` or `score` is required".into(),
                })
            }
        };
        if output.kind() != set.kind {
            return Err(Error::MixedKinds {
                id: wire.id,
                expected: set.kind.to_string(),
            });
        }
        match &output {
            ModelOutput::Probs(p) => {
                if !is_distribution(p) {
                    return Err(Error::NotADistribution { id: wire.id });
                }
                if *width.get_or_insert(p.len()) != p.len() {
                    return Err(Error::InvalidRecord {
                        id: wire.id,
                        reason: format!("expected {} probabilities, got {}", width.unwrap(), p.len()),
                    });
                }
                if wire.gold >= p.len() {
                    return Err(Error::LabelOutOfRange {
                        label: wire.gold,
                        classes: p.len(),
                    });
                }
            }
            ModelOutput::Score(s) => {
                if !s.is_finite() {
                    return Err(Error::NonFiniteScore(*s));
                }
            }
        }
        if !seen.insert(wire.id.clone()) {
            return Err(Error::DuplicateId(wire.id));
        }
        set.records.push(PredictionRecord {
            id: wire.id,
            gold: wire.gold,
            output,
        });
    }
    Ok(set)
}

pub fn write_predictions<W: Write>(set: &PredictionSet, mut writer: W) -> Result<()> {
    let header = Header {
        model_name: set.model_name.clone(),
        seed: set.seed,
        kind: set.kind,
        constant: set.constant,
    };
    serde_json::to_writer(&mut writer, &header)?;
    writer.write_all(b"\n")?;
    for r in &set.records {
        let (probs, score) = match &r.output {
            ModelOutput::Probs(p) => (Some(p.clone()), None),
            ModelOutput::Score(s) => (None, Some(*s)),
        };
        let wire = WireRecord {
            id: r.id.clone(),
            gold: r.gold,
            probs,
            score,
        };
        serde_json::to_writer(&mut writer, &wire)?;
        writer.write_all(b"\n")?;
    }
    Ok(())
}

/// Model outputs for a whole split, one entry per dataset record.
#[derive(Debug, Clone, PartialEq)]
pub enum Outputs {
    Probabilities(Vec<Vec<f64>>),
    Scores(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlignedPredictions {
    pub ids: Vec<String>,
    pub gold: Vec<usize>,
    pub outputs: Outputs,
    pub constant: bool,
}

impl AlignedPredictions {
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }
}

/// Orders predictions by dataset order and cross-checks gold labels.
pub fn align(preds: &PredictionSet, split: &DatasetSplit) -> Result<AlignedPredictions> {
    let by_id: HashMap<&str, &PredictionRecord> = preds.records.iter().map(|r| (r.id.as_str(), r)).collect();
    let dataset_ids: HashSet<&str> = split.records.iter().map(|r| r.id.as_str()).collect();

    let missing: Vec<String> = split
        .records
        .iter()
        .filter(|r| !by_id.contains_key(r.id.as_str()))
        .take(MAX_LISTED_OFFENDERS)
        .map(|r| r.id.clone())
        .collect();
    if !missing.is_empty() {
        return Err(Error::MissingPredictions(missing));
    }
    let extra: Vec<String> = preds
        .records
        .iter()
        .filter(|r| !dataset_ids.contains(r.id.as_str()))
        .take(MAX_LISTED_OFFENDERS)
        .map(|r| r.id.clone())
        .collect();
    if !extra.is_empty() {
        return Err(Error::ExtraPredictions(extra));
    }

    let classes = split.schema.num_classes();
    let mut ids = Vec::with_capacity(split.len());
    let mut gold = Vec::with_capacity(split.len());
    let mut probs = Vec::new();
    let mut scores = Vec::new();
    for r in &split.records {
        let p = by_id[r.id.as_str()];
        if p.gold != r.label {
            return Err(Error::GoldMismatch {
                id: r.id.clone(),
                prediction: p.gold,
                dataset: r.label,
            });
        }
        match &p.output {
            ModelOutput::Probs(v) => {
                if v.len() != classes {
                    return Err(Error::InvalidRecord {
                        id: r.id.clone(),
                        reason: format!("{} probabilities for a {classes}-class schema", v.len()),
                    });
                }
                probs.push(v.clone());
            }
            ModelOutput::Score(s) => scores.push(*s),
        }
        ids.push(r.id.clone());
        gold.push(r.label);
    }
    let outputs = match preds.kind {
        PredictionKind::Probabilistic => Outputs::Probabilities(probs),
        PredictionKind::Scalar => Outputs::Scores(scores),
    };
    Ok(AlignedPredictions {
        ids,
        gold,
        outputs,
        constant: preds.constant,
    })
}

/// Index of the largest entry; ties go to the lowest index.
pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate().skip(1) {
        if *v > values[best] {
            best = i;
        }
    }
    best
}

pub fn hard_labels(preds: &PredictionSet) -> Result<Vec<usize>> {
    if preds.kind != PredictionKind::Probabilistic {
        return Err(Error::WrongKind(
            "hard labels need probabilistic predictions; map scalar scores with thresholds::labels_from_scores".into(),
        ));
    }
    Ok(preds
        .records
        .iter()
        .map(|r| match &r.output {
            ModelOutput::Probs(p) => argmax(p),
            ModelOutput::Score(_) => unreachable!("kind validated at load"),
        })
        .collect())
}
