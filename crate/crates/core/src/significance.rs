//! Model ranking with Almost Stochastic Order (ASO) tests.
//!
//! For score samples `a` and `b` with empirical quantile functions `Qa`, `Qb`,
//! the violation ratio is
//!
//! ```text
//! eps = ∫_{Qa < Qb} (Qb - Qa)^2 dt  /  ∫_0^1 (Qa - Qb)^2 dt
//! ```
//!
//! i.e. the share of the squared quantile distance in which `a` falls below
//! `b`. It is 0 when `a` is stochastically dominant, 1 when `b` is, and set
//! to 0.5 when the samples coincide. `eps_min` is the bootstrap upper
//! confidence bound
//!
//! ```text
//! eps_min = eps - sigma / sqrt(nm / (n + m)) * Phi^{-1}(alpha)
//! ```
//!
//! where `sigma` is the standard deviation of `sqrt(nm / (n + m)) * (eps* - eps)`
//! over bootstrap replicates `eps*`. `a` almost stochastically dominates `b`
//! when `eps_min < tau`.

use std::collections::HashSet;

use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::rng;

/// Below this many scores per model, eps_min is noisy and callers are warned.
pub const SMALL_SAMPLE_WARNING: usize = 5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreSample {
    pub model_id: String,
    pub metric: String,
    /// One score per seed or run.
    pub scores: Vec<f64>,
}

impl ScoreSample {
    pub fn new(model_id: impl Into<String>, metric: impl Into<String>, scores: Vec<f64>) -> Self {
        Self {
            model_id: model_id.into(),
            metric: metric.into(),
            scores,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.scores.len() < 2 {
            return Err(Error::TooFewScores {
                model: self.model_id.clone(),
                count: self.scores.len(),
            });
        }
        if let Some(s) = self.scores.iter().find(|s| !s.is_finite()) {
            return Err(Error::NonFiniteScore(*s));
        }
        Ok(())
    }
}

/// How the violation-ratio integrals are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Integration {
    /// Exact integration of the two step-function quantile curves.
    Exact,
    /// Midpoint rule on a uniform grid of this many points in (0, 1).
    Grid(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AsoConfig {
    pub alpha: f64,
    pub bootstrap_count: usize,
    /// Dominance threshold on `eps_min`.
    pub tau: f64,
    pub integration: Integration,
    pub seed: u64,
}

impl Default for AsoConfig {
    fn default() -> Self {
        Self {
            alpha: 0.05,
            bootstrap_count: 1000,
            tau: 0.5,
            integration: Integration::Exact,
            seed: 1234,
        }
    }
}

impl AsoConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "alpha must be in (0, 1), got {}",
                self.alpha
            )));
        }
        if !(self.tau > 0.0 && self.tau <= 1.0) {
            return Err(Error::InvalidConfig(format!("tau must be in (0, 1], got {}", self.tau)));
        }
        if self.bootstrap_count < 100 {
            return Err(Error::InvalidConfig(format!(
                "bootstrap_count must be at least 100, got {}",
                self.bootstrap_count
            )));
        }
        if let Integration::Grid(0) = self.integration {
            return Err(Error::InvalidConfig("grid needs at least one point".into()));
        }
        Ok(())
    }
}

/// `(violating, total)` squared quantile distance, both with the same scale.
fn violation_parts(a_sorted: &[f64], b_sorted: &[f64], integration: Integration) -> (f64, f64) {
    let mut violating = 0.0;
    let mut total = 0.0;
    let mut add = |weight: f64, qa: f64, qb: f64| {
        let d = qa - qb;
        let sq = weight * d * d;
        total += sq;
        if d < 0.0 {
            violating += sq;
        }
    };
    match integration {
        Integration::Exact => {
            // Qa steps at multiples of 1/n, Qb at multiples of 1/m; in units
            // of 1/(nm) those are multiples of m and n respectively.
            let (n, m) = (a_sorted.len(), b_sorted.len());
            let (mut i, mut j, mut pos) = (0usize, 0usize, 0usize);
            while i < n && j < m {
                let next = ((i + 1) * m).min((j + 1) * n);
                add((next - pos) as f64, a_sorted[i], b_sorted[j]);
                pos = next;
                if pos == (i + 1) * m {
                    i += 1;
                }
                if pos == (j + 1) * n {
                    j += 1;
                }
            }
        }
        Integration::Grid(points) => {
            for k in 0..points {
                let t = (k as f64 + 0.5) / points as f64;
                add(1.0, quantile(a_sorted, t), quantile(b_sorted, t));
            }
        }
    }
    (violating, total)
}

/// Left-continuous empirical quantile of a sorted sample, `t` in (0, 1].
pub fn quantile(sorted: &[f64], t: f64) -> f64 {
    let n = sorted.len();
    let k = ((t * n as f64).ceil() as usize).clamp(1, n);
    sorted[k - 1]
}

fn sorted(xs: &[f64]) -> Vec<f64> {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

/// Point estimate of the violation ratio of `a` against `b`.
pub fn violation_ratio(a: &[f64], b: &[f64], integration: Integration) -> f64 {
    let (violating, total) = violation_parts(&sorted(a), &sorted(b), integration);
    if total == 0.0 {
        0.5
    } else {
        violating / total
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsoOutcome {
    pub eps_hat: f64,
    pub sigma_hat: f64,
    pub eps_min: f64,
}

/// ASO test of "a almost stochastically dominates b" at `cfg.alpha`.
pub fn aso(a: &ScoreSample, b: &ScoreSample, cfg: &AsoConfig) -> Result<AsoOutcome> {
    cfg.validate()?;
    let (n, m) = (a.scores.len(), b.scores.len());
    if n.min(m) < SMALL_SAMPLE_WARNING {
        log::warn!(
            "ASO on {} vs {} with {n} and {m} scores; eps_min is noisy below {SMALL_SAMPLE_WARNING}",
            a.model_id,
            b.model_id
        );
    }
    run_aso(a, b, cfg)
}

fn run_aso(a: &ScoreSample, b: &ScoreSample, cfg: &AsoConfig) -> Result<AsoOutcome> {
    if a.metric != b.metric {
        return Err(Error::MetricMismatch(a.metric.clone(), b.metric.clone()));
    }
    a.validate()?;
    b.validate()?;
    let (n, m) = (a.scores.len(), b.scores.len());

    let eps_hat = violation_ratio(&a.scores, &b.scores, cfg.integration);

    let stream = rng::derive_seed(cfg.seed, &["aso", &a.metric, &a.model_id, &b.model_id]);
    let mut r = rng::seeded(stream);
    let scale = ((n * m) as f64 / (n + m) as f64).sqrt();
    let mut ra = vec![0.0; n];
    let mut rb = vec![0.0; m];
    let replicates: Vec<f64> = (0..cfg.bootstrap_count)
        .map(|_| {
            for x in ra.iter_mut() {
                *x = a.scores[r.random_range(0..n)];
            }
            for x in rb.iter_mut() {
                *x = b.scores[r.random_range(0..m)];
            }
            scale * (violation_ratio(&ra, &rb, cfg.integration) - eps_hat)
        })
        .collect();
    let mean = replicates.iter().sum::<f64>() / replicates.len() as f64;
    let var = replicates.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / replicates.len() as f64;
    let sigma_hat = var.sqrt();

    let z = Normal::standard().inverse_cdf(cfg.alpha);
    let eps_min = (eps_hat - sigma_hat / scale * z).clamp(0.0, 1.0);
    Ok(AsoOutcome {
        eps_hat,
        sigma_hat,
        eps_min,
    })
}

pub fn eps_min(a: &ScoreSample, b: &ScoreSample, cfg: &AsoConfig) -> Result<f64> {
    aso(a, b, cfg).map(|o| o.eps_min)
}

/// Family-wise level for `models` models compared over all ordered pairs.
pub fn bonferroni_alpha(alpha: f64, models: usize) -> f64 {
    alpha / (models * (models - 1)) as f64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DominanceMatrix {
    pub metric: String,
    pub models: Vec<String>,
    pub alpha_adjusted: f64,
    /// `[a][b]`: eps_min for "a dominates b". Diagonal is 0.5.
    pub eps_min: Vec<Vec<f64>>,
    pub dominant: Vec<Vec<bool>>,
    /// `a` dominates `b` and `b` does not dominate `a`.
    pub better: Vec<Vec<bool>>,
}

impl DominanceMatrix {
    pub fn index_of(&self, model: &str) -> Option<usize> {
        self.models.iter().position(|m| m == model)
    }

    /// Neither or both directions dominant.
    pub fn insignificant(&self, a: usize, b: usize) -> bool {
        !self.better[a][b] && !self.better[b][a]
    }
}

/// Runs ASO over every ordered pair with a Bonferroni-adjusted level.
/// Emits a single small-sample warning rather than one per pair.
pub fn compare_all(samples: &[ScoreSample], cfg: &AsoConfig) -> Result<DominanceMatrix> {
    cfg.validate()?;
    let models = samples.len();
    if models < 2 {
        return Err(Error::TooFewModels(models));
    }
    let metric = samples[0].metric.clone();
    let mut ids = HashSet::new();
    for s in samples {
        if s.metric != metric {
            return Err(Error::MetricMismatch(metric, s.metric.clone()));
        }
        if !ids.insert(s.model_id.as_str()) {
            return Err(Error::DuplicateModel(s.model_id.clone()));
        }
        s.validate()?;
    }
    let smallest = samples.iter().map(|s| s.scores.len()).min().unwrap_or(0);
    if smallest < SMALL_SAMPLE_WARNING {
        log::warn!("{metric}: smallest sample has {smallest} scores; eps_min is noisy below {SMALL_SAMPLE_WARNING}");
    }
    let alpha_adjusted = bonferroni_alpha(cfg.alpha, models);
    let pair_cfg = AsoConfig {
        alpha: alpha_adjusted,
        ..cfg.clone()
    };

    let pairs: Vec<(usize, usize)> = (0..models)
        .flat_map(|a| (0..models).filter(move |&b| b != a).map(move |b| (a, b)))
        .collect();
    let results = pairs
        .par_iter()
        .map(|&(a, b)| run_aso(&samples[a], &samples[b], &pair_cfg).map(|o| o.eps_min))
        .collect::<Result<Vec<_>>>()?;

    let mut eps = vec![vec![0.5; models]; models];
    let mut dominant = vec![vec![false; models]; models];
    for (&(a, b), e) in pairs.iter().zip(results) {
        eps[a][b] = e;
        dominant[a][b] = e < cfg.tau;
    }
    let better = (0..models)
        .map(|a| (0..models).map(|b| dominant[a][b] && !dominant[b][a]).collect())
        .collect();
    Ok(DominanceMatrix {
        metric,
        models: samples.iter().map(|s| s.model_id.clone()).collect(),
        alpha_adjusted,
        eps_min: eps,
        dominant,
        better,
    })
}

/// Models that no other model is better than, in matrix order.
pub fn best_set(matrix: &DominanceMatrix) -> Vec<String> {
    let m = matrix.models.len();
    (0..m)
        .filter(|&b| !(0..m).any(|a| matrix.better[a][b]))
        .map(|b| matrix.models[b].clone())
        .collect()
}
