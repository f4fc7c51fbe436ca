use std::path::Path;

use anyhow::{bail, Context, Result};
use crossbal::significance::AsoConfig;
use crossbal::thresholds::ThresholdSpec;
use serde::Deserialize;

pub const DEFAULT_SEEDS: [u64; 3] = [6, 17, 42];

/// Optional TOML config; every value can be overridden by a flag.
///
/// ```toml
/// seeds = [6, 17, 42]
///
/// [thresholds]
/// lower = 0.3333333333333333
/// upper = 0.6666666666666666
///
/// [aso]
/// alpha = 0.05
/// bootstrap_count = 1000
/// tau = 0.5
/// seed = 1234
/// integration = "exact"  # or { grid = 1000 }
/// ```
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub seeds: Option<Vec<u64>>,
    pub thresholds: ThresholdSpec,
    pub aso: AsoConfig,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        let cfg: FileConfig = toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))?;
        cfg.thresholds.validate()?;
        cfg.aso.validate()?;
        Ok(cfg)
    }
}

/// Seeds from flag, then environment (`CROSSBAL_SEEDS`, comma separated),
/// then config file, then the default {6, 17, 42}.
pub fn resolve_seeds(flag: Option<&str>, file: &FileConfig) -> Result<Vec<u64>> {
    let env = std::env::var("CROSSBAL_SEEDS").ok();
    let seeds = match flag.or(env.as_deref()) {
        Some(list) => parse_seed_list(list)?,
        None => file.seeds.clone().unwrap_or_else(|| DEFAULT_SEEDS.to_vec()),
    };
    if seeds.is_empty() {
        bail!("seed list is empty");
    }
    Ok(seeds)
}

pub fn parse_seed_list(list: &str) -> Result<Vec<u64>> {
    list.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.trim().parse::<u64>().with_context(|| format!("bad seed {s:?}")))
        .collect()
}
