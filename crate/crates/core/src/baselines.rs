//! Reference predictors: the majority-class baseline and a modifier-only
//! lexical classifier.

use std::collections::BTreeMap;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::dataset::{distribution, ClassDistribution, DatasetSplit};
use crate::error::{Error, Result};
use crate::predictions::{ModelOutput, PredictionKind, PredictionRecord, PredictionSet};
use crate::rng;

/// Added to one tied maximum before renormalising.
pub const TIE_JITTER: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MajorityModel {
    pub majority_class: usize,
    pub train_distribution: ClassDistribution,
}

/// Most frequent training class; exact ties go to the lowest index.
pub fn fit_majority(train: &DatasetSplit) -> Result<MajorityModel> {
    if train.is_empty() {
        return Err(Error::EmptySplit);
    }
    let dist = distribution(train);
    let mut majority_class = 0;
    for (c, &n) in dist.counts.iter().enumerate() {
        if n > dist.counts[majority_class] {
            majority_class = c;
        }
    }
    Ok(MajorityModel {
        majority_class,
        train_distribution: dist,
    })
}

/// One-hot vectors on the majority class. The set is flagged `constant` so
/// evaluation reports no ROC-AUC for it.
pub fn predict_majority(model: &MajorityModel, split: &DatasetSplit) -> PredictionSet {
    let classes = model.train_distribution.counts.len();
    let mut onehot = vec![0.0; classes];
    onehot[model.majority_class] = 1.0;
    let mut set = PredictionSet::new("majority", 0, PredictionKind::Probabilistic);
    set.constant = true;
    set.records = split
        .records
        .iter()
        .map(|r| PredictionRecord {
            id: r.id.clone(),
            gold: r.label,
            output: ModelOutput::Probs(onehot.clone()),
        })
        .collect();
    set
}

/// Add-one smoothed class distribution per adjectival modifier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LexicalModel {
    pub classes: usize,
    pub modifier_counts: BTreeMap<String, Vec<usize>>,
    pub class_counts: Vec<usize>,
    pub seed: u64,
}

impl LexicalModel {
    fn smoothed(&self, counts: &[usize]) -> Vec<f64> {
        let total: usize = counts.iter().sum();
        let denom = (total + self.classes) as f64;
        counts.iter().map(|&c| (c + 1) as f64 / denom).collect()
    }

    pub fn prior(&self) -> Vec<f64> {
        self.smoothed(&self.class_counts)
    }

    /// Smoothed distribution for a modifier; the prior when unseen.
    pub fn distribution(&self, modifier: &str) -> Vec<f64> {
        match self.modifier_counts.get(&normalize(modifier)) {
            Some(counts) => self.smoothed(counts),
            None => self.prior(),
        }
    }
}

fn normalize(modifier: &str) -> String {
    modifier.trim().to_lowercase()
}

pub fn fit_lexical(train: &DatasetSplit, seed: u64) -> Result<LexicalModel> {
    if train.is_empty() {
        return Err(Error::EmptySplit);
    }
    let classes = train.schema.num_classes();
    let mut modifier_counts: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    for r in &train.records {
        modifier_counts
            .entry(normalize(&r.modifier))
            .or_insert_with(|| vec![0; classes])[r.label] += 1;
    }
    Ok(LexicalModel {
        classes,
        modifier_counts,
        class_counts: distribution(train).counts,
        seed,
    })
}

/// Breaks an exact tie for the maximum by nudging one tied class, chosen by
/// a stream keyed on (seed, record id). Untied vectors pass through.
fn jitter_ties(mut probs: Vec<f64>, seed: u64, id: &str) -> Vec<f64> {
    let max = probs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let tied: Vec<usize> = (0..probs.len()).filter(|&c| probs[c] == max).collect();
    if tied.len() < 2 {
        return probs;
    }
    let mut r = rng::seeded(rng::derive_seed(seed, &["lexical", id]));
    let pick = tied[r.random_range(0..tied.len())];
    probs[pick] += TIE_JITTER;
    let total: f64 = probs.iter().sum();
    probs.iter_mut().for_each(|p| *p /= total);
    probs
}

pub fn predict_lexical(model: &LexicalModel, split: &DatasetSplit) -> PredictionSet {
    let mut set = PredictionSet::new("lexical", model.seed, PredictionKind::Probabilistic);
    set.records = split
        .records
        .iter()
        .map(|r| PredictionRecord {
            id: r.id.clone(),
            gold: r.label,
            output: ModelOutput::Probs(jitter_ties(model.distribution(&r.modifier), model.seed, &r.id)),
        })
        .collect();
    set
}
