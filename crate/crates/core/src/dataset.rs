//! Sentence-pair datasets: ingestion, 5→3 class adaptation and seeded
//! down-sampling.
//!
//! Files are line-delimited JSON, one object per line. Canonical field names
//! are `id`, `sentence1`, `sentence2`, `modifier` and `label`; a
//! [`FieldMapping`] renames them for sources that use different keys.

use std::collections::{HashMap, HashSet};
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::rng;

const ORIGINAL_LABELS: [&str; 5] = [
    "impossible",
    "less likely",
    "equally likely",
    "more likely",
    "necessarily true",
];
const ADAPTED_LABELS: [&str; 3] = ["less likely", "equally likely", "more likely"];

/// Class index of "equally likely" in the adapted schema.
pub const EQUALLY_LIKELY: usize = 1;

/// Which label inventory a split uses.
///
/// The original schema has five ordinal classes. The adapted schema keeps the
/// three mid-range ones (original indices 1, 2, 3 become 0, 1, 2).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LabelSchema {
    Original,
    Adapted,
}

impl LabelSchema {
    pub fn labels(self) -> &'static [&'static str] {
        match self {
            LabelSchema::Original => &ORIGINAL_LABELS,
            LabelSchema::Adapted => &ADAPTED_LABELS,
        }
    }

    pub fn num_classes(self) -> usize {
        self.labels().len()
    }

    pub fn label_name(self, class: usize) -> Option<&'static str> {
        self.labels().get(class).copied()
    }

    /// Original index → adapted index; `None` for dropped classes.
    pub fn remap(original: usize) -> Option<usize> {
        match original {
            1..=3 => Some(original - 1),
            _ => None,
        }
    }

    /// Resolves a label name (case, `_` and `-` insensitive) or a numeric
    /// string to a class index.
    pub fn parse_label(self, raw: &str) -> Result<usize> {
        let normalized: String = raw
            .trim()
            .chars()
            .map(|c| {
                if c == '_' || c == '-' {
                    ' '
                } else {
                    c.to_ascii_lowercase()
                }
            })
            .collect();
        let normalized = normalized.split_whitespace().collect::<Vec<_>>().join(" ");
        if let Some(idx) = self.labels().iter().position(|l| *l == normalized) {
            return Ok(idx);
        }
        if let Ok(idx) = normalized.parse::<usize>() {
            if idx < self.num_classes() {
                return Ok(idx);
            }
        }
        Err(Error::UnknownLabel(raw.to_string()))
    }

    fn label_from_value(self, value: &Value) -> Result<usize> {
        match value {
            Value::Number(n) => match n.as_u64() {
                Some(idx) if (idx as usize) < self.num_classes() => Ok(idx as usize),
                _ => Err(Error::UnknownLabel(n.to_string())),
            },
            Value::String(s) => self.parse_label(s),
            other => Err(Error::UnknownLabel(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SentencePair {
    pub id: String,
    /// Unmodified sentence.
    pub sentence1: String,
    /// Sentence with the adjectival modifier inserted.
    pub sentence2: String,
    pub modifier: String,
    pub label: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatasetSplit {
    pub name: String,
    pub schema: LabelSchema,
    pub records: Vec<SentencePair>,
}

impl DatasetSplit {
    pub fn new(name: impl Into<String>, schema: LabelSchema, records: Vec<SentencePair>) -> Self {
        Self {
            name: name.into(),
            schema,
            records,
        }
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn labels(&self) -> Vec<usize> {
        self.records.iter().map(|r| r.label).collect()
    }

    pub fn ids(&self) -> Vec<String> {
        self.records.iter().map(|r| r.id.clone()).collect()
    }
}

/// Canonical field names understood by [`parse_dataset`].
pub const CANONICAL_FIELDS: [&str; 5] = ["id", "sentence1", "sentence2", "modifier", "label"];

/// Maps canonical field names to the keys used by a source file.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FieldMapping {
    renames: HashMap<String, String>,
}

impl FieldMapping {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn with(mut self, canonical: &str, source: &str) -> Result<Self> {
        if !CANONICAL_FIELDS.contains(&canonical) {
            return Err(Error::InvalidConfig(format!(
                "unknown canonical field {canonical:?}; expected one of {CANONICAL_FIELDS:?}"
            )));
        }
        self.renames.insert(canonical.to_string(), source.to_string());
        Ok(self)
    }

    /// Parses `canonical=source` pairs, e.g. `label=plausibility`.
    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = &'a str>) -> Result<Self> {
        pairs.into_iter().try_fold(Self::identity(), |mapping, pair| {
            let (canonical, source) = pair
                .split_once('=')
                .ok_or_else(|| Error::InvalidConfig(format!("field mapping {pair:?} is not canonical=source")))?;
            mapping.with(canonical.trim(), source.trim())
        })
    }

    pub fn source<'a>(&'a self, canonical: &'a str) -> &'a str {
        self.renames.get(canonical).map(String::as_str).unwrap_or(canonical)
    }
}

/// Parses a split whose labels are in the original 5-class schema.
pub fn parse_dataset<R: BufRead>(reader: R, name: &str, mapping: &FieldMapping) -> Result<DatasetSplit> {
    parse_split(reader, name, LabelSchema::Original, mapping)
}

/// Parses a line-delimited split in the given schema. Blank lines are
/// skipped; ids default to `<name>-<lineno>` when the source has none.
pub fn parse_split<R: BufRead>(
    reader: R,
    name: &str,
    schema: LabelSchema,
    mapping: &FieldMapping,
) -> Result<DatasetSplit> {
    let mut records = Vec::new();
    let mut seen = HashSet::new();
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let value: Value = serde_json::from_str(&line).map_err(|e| Error::Parse {
            line: lineno,
            message: e.to_string(),
        })?;
        let obj = value.as_object().ok_or_else(|| Error::Parse {
            line: lineno,
            message: "expected a JSON object".into(),
        })?;

        let field = |canonical: &str| -> Result<&Value> {
            obj.get(mapping.source(canonical)).ok_or_else(|| Error::MissingField {
                line: lineno,
                field: mapping.source(canonical).to_string(),
            })
        };
        let text = |canonical: &str| -> Result<String> {
            match field(canonical)? {
                Value::String(s) => Ok(s.clone()),
                other => Err(Error::Parse {
                    line: lineno,
                    message: format!("field `{}` must be a string, got {other}", mapping.source(canonical)),
                }),
            }
        };

        let id = match obj.get(mapping.source("id")) {
            Some(Value::String(s)) => s.clone(),
            Some(Value::Number(n)) => n.to_string(),
            Some(other) => {
                return Err(Error::Parse {
                    line: lineno,
                    message: format!("id must be a string or number, got {other}"),
                })
            }
            None => format!("{name}-{lineno}"),
        };
        let sentence1 = text("sentence1")?;
        let sentence2 = text("sentence2")?;
        let modifier = text("modifier")?;
        let label = schema.label_from_value(field("label")?)?;

        if sentence1 == sentence2 {
            return Err(Error::InvalidRecord {
                id,
                reason: "sentence1 and sentence2 are identical".into(),
            });
        }
        if !seen.insert(id.clone()) {
            return Err(Error::DuplicateId(id));
        }
        records.push(SentencePair {
            id,
            sentence1,
            sentence2,
            modifier,
            label,
        });
    }
    Ok(DatasetSplit::new(name, schema, records))
}

#[derive(Serialize)]
struct CanonicalRecord<'a> {
    id: &'a str,
    sentence1: &'a str,
    sentence2: &'a str,
    modifier: &'a str,
    label: &'a str,
}

/// Writes the split in canonical form, labels as names of the split's schema.
pub fn write_split<W: Write>(split: &DatasetSplit, mut writer: W) -> Result<()> {
    for r in &split.records {
        let label = split.schema.label_name(r.label).ok_or(Error::LabelOutOfRange {
            label: r.label,
            classes: split.schema.num_classes(),
        })?;
        let rec = CanonicalRecord {
            id: &r.id,
            sentence1: &r.sentence1,
            sentence2: &r.sentence2,
            modifier: &r.modifier,
            label,
        };
        serde_json::to_writer(&mut writer, &rec)?;
        writer.write_all(b"\n")?;
    }
    Ok(())
}

/// Drops "impossible" and "necessarily true" and remaps the rest to the
/// 3-class schema, preserving order.
pub fn adapt(split: &DatasetSplit) -> Result<DatasetSplit> {
    if split.schema == LabelSchema::Adapted {
        return Err(Error::AlreadyAdapted);
    }
    let records = split
        .records
        .iter()
        .filter_map(|r| LabelSchema::remap(r.label).map(|label| SentencePair { label, ..r.clone() }))
        .collect();
    Ok(DatasetSplit::new(split.name.clone(), LabelSchema::Adapted, records))
}

/// Keeps exactly `target_count` records of `target_class`, chosen uniformly
/// without replacement by the seeded ChaCha8 stream. Everything else,
/// including relative order, is untouched.
pub fn downsample(split: &DatasetSplit, target_class: usize, target_count: usize, seed: u64) -> Result<DatasetSplit> {
    if split.schema != LabelSchema::Adapted {
        return Err(Error::NotAdapted);
    }
    let classes = split.schema.num_classes();
    if target_class >= classes {
        return Err(Error::UnknownClass {
            class: target_class,
            classes,
        });
    }
    let positions: Vec<usize> = split
        .records
        .iter()
        .enumerate()
        .filter(|(_, r)| r.label == target_class)
        .map(|(i, _)| i)
        .collect();
    if target_count > positions.len() {
        return Err(Error::DownsampleTooLarge {
            class: target_class,
            requested: target_count,
            available: positions.len(),
        });
    }

    let mut rng = rng::seeded(seed);
    let mut keep = vec![true; split.len()];
    for &p in &positions {
        keep[p] = false;
    }
    for i in rand::seq::index::sample(&mut rng, positions.len(), target_count) {
        keep[positions[i]] = true;
    }
    let records = split
        .records
        .iter()
        .zip(keep)
        .filter(|(_, k)| *k)
        .map(|(r, _)| r.clone())
        .collect();
    Ok(DatasetSplit::new(split.name.clone(), split.schema, records))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassDistribution {
    pub counts: Vec<usize>,
    pub proportions: Vec<f64>,
}

impl ClassDistribution {
    pub fn from_labels(labels: &[usize], classes: usize) -> Self {
        let mut counts = vec![0usize; classes];
        for &l in labels {
            if l < classes {
                counts[l] += 1;
            }
        }
        Self::from_counts(counts)
    }

    pub fn from_counts(counts: Vec<usize>) -> Self {
        let total: usize = counts.iter().sum();
        let proportions = counts
            .iter()
            .map(|&c| if total == 0 { 0.0 } else { c as f64 / total as f64 })
            .collect();
        Self { counts, proportions }
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }
}

pub fn distribution(split: &DatasetSplit) -> ClassDistribution {
    ClassDistribution::from_labels(&split.labels(), split.schema.num_classes())
}
