//! Cross-balanced evaluation.
//!
//! Let `s` be the size of the smallest class. Iteration `i` evaluates, for
//! every class, the `s` consecutive instances starting at offset `i * s`
//! (wrapping to the start of the class when the end is reached), so each
//! iteration is exactly balanced. Iterations continue until the largest class
//! has been fully covered, `r = ceil(max_size / s)`, and the per-iteration
//! metrics are averaged without weights.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::DatasetSplit;
use crate::error::{Error, Result};
use crate::metrics::{bundle_from, ClassScores, ConfusionMatrix, Instances, MetricsBundle};
use crate::rng;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossBalancePlan {
    /// Window size: the smallest class size.
    pub s: usize,
    /// Number of iterations.
    pub r: usize,
    pub classes: usize,
    /// Record positions of each class, in evaluation order.
    pub class_indices: Vec<Vec<usize>>,
}

impl CrossBalancePlan {
    pub fn from_labels(labels: &[usize], classes: usize) -> Result<Self> {
        let mut class_indices = vec![Vec::new(); classes];
        for (pos, &l) in labels.iter().enumerate() {
            if l >= classes {
                return Err(Error::LabelOutOfRange { label: l, classes });
            }
            class_indices[l].push(pos);
        }
        if let Some(empty) = class_indices.iter().position(Vec::is_empty) {
            return Err(Error::EmptyClass(empty));
        }
        let s = class_indices.iter().map(Vec::len).min().unwrap_or(0);
        let largest = class_indices.iter().map(Vec::len).max().unwrap_or(0);
        if s == 0 {
            return Err(Error::EmptyClass(0));
        }
        Ok(Self {
            s,
            r: largest.div_ceil(s),
            classes,
            class_indices,
        })
    }

    /// Reorders instances within each class with a seeded shuffle. Off by
    /// default; evaluation normally walks classes in dataset order.
    pub fn shuffled(mut self, seed: u64) -> Self {
        use rand::seq::SliceRandom;
        for (c, positions) in self.class_indices.iter_mut().enumerate() {
            let mut r = rng::seeded(rng::derive_seed(seed, &["cross-balance", &c.to_string()]));
            positions.shuffle(&mut r);
        }
        self
    }

    pub fn class_size(&self, class: usize) -> usize {
        self.class_indices[class].len()
    }

    /// Record positions of `class` evaluated in iteration `iteration`.
    pub fn window(&self, class: usize, iteration: usize) -> Result<Vec<usize>> {
        if iteration >= self.r {
            return Err(Error::IterationOutOfRange {
                iteration,
                iterations: self.r,
            });
        }
        let members = self.class_indices.get(class).ok_or(Error::UnknownClass {
            class,
            classes: self.classes,
        })?;
        Ok(window_offsets(members.len(), self.s, iteration)
            .map(|k| members[k])
            .collect())
    }

    /// All positions of one iteration, class by class.
    pub fn iteration(&self, iteration: usize) -> Result<Vec<usize>> {
        let mut positions = Vec::with_capacity(self.s * self.classes);
        for c in 0..self.classes {
            positions.extend(self.window(c, iteration)?);
        }
        Ok(positions)
    }
}

/// Offsets within a class of size `n` covered by window `iteration` of width `s`.
pub fn window_offsets(n: usize, s: usize, iteration: usize) -> impl Iterator<Item = usize> {
    let start = (iteration * s) % n;
    (0..s).map(move |j| (start + j) % n)
}

pub fn plan(split: &DatasetSplit) -> Result<CrossBalancePlan> {
    CrossBalancePlan::from_labels(&split.labels(), split.schema.num_classes())
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossBalanceOptions {
    /// Seed for the opt-in within-class shuffle.
    pub shuffle_seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationResult {
    pub iteration: usize,
    pub bundle: MetricsBundle,
    pub confusion: ConfusionMatrix,
    pub member_ids: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossBalancedResult {
    pub plan: CrossBalancePlan,
    pub per_iteration: Vec<IterationResult>,
    pub mean_bundle: MetricsBundle,
}

/// Running mean; exact for constant sequences.
#[derive(Debug, Default, Clone, Copy)]
struct Mean {
    value: f64,
    count: usize,
}

impl Mean {
    fn push(&mut self, x: f64) {
        self.count += 1;
        self.value += (x - self.value) / self.count as f64;
    }

    fn get(self) -> Option<f64> {
        (self.count > 0).then_some(self.value)
    }
}

pub fn average_bundles(bundles: &[&MetricsBundle]) -> Result<MetricsBundle> {
    let first = bundles.first().ok_or(Error::NoInstances)?;
    let classes = first.per_class.len();
    let mut accuracy = Mean::default();
    let mut f1 = Mean::default();
    let mut auc = Mean::default();
    let mut n = Mean::default();
    let mut per_class = vec![[Mean::default(); 3]; classes];
    for b in bundles {
        accuracy.push(b.accuracy);
        f1.push(b.f1_macro);
        n.push(b.n as f64);
        if let Some(a) = b.roc_auc {
            auc.push(a);
        }
        for (acc, s) in per_class.iter_mut().zip(&b.per_class) {
            acc[0].push(s.precision);
            acc[1].push(s.recall);
            acc[2].push(s.f1);
        }
    }
    Ok(MetricsBundle {
        n: n.get().unwrap_or(0.0).round() as usize,
        accuracy: accuracy.get().unwrap_or(0.0),
        f1_macro: f1.get().unwrap_or(0.0),
        roc_auc: auc.get(),
        per_class: per_class
            .into_iter()
            .map(|[p, r, f]| ClassScores {
                precision: p.get().unwrap_or(0.0),
                recall: r.get().unwrap_or(0.0),
                f1: f.get().unwrap_or(0.0),
            })
            .collect(),
    })
}

pub fn evaluate_cross_balanced(instances: &Instances, options: CrossBalanceOptions) -> Result<CrossBalancedResult> {
    let mut plan = CrossBalancePlan::from_labels(&instances.gold, instances.classes)?;
    if let Some(seed) = options.shuffle_seed {
        plan = plan.shuffled(seed);
    }
    evaluate_with_plan(instances, plan)
}

pub fn evaluate_with_plan(instances: &Instances, plan: CrossBalancePlan) -> Result<CrossBalancedResult> {
    let per_iteration = (0..plan.r)
        .into_par_iter()
        .map(|i| {
            let window = instances.subset(&plan.iteration(i)?);
            let confusion = window.confusion()?;
            let bundle = bundle_from(&confusion, &window)?;
            Ok(IterationResult {
                iteration: i,
                bundle,
                confusion,
                member_ids: window.ids,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mean_bundle = average_bundles(&per_iteration.iter().map(|it| &it.bundle).collect::<Vec<_>>())?;
    Ok(CrossBalancedResult {
        plan,
        per_iteration,
        mean_bundle,
    })
}
