//! Confusion heatmaps, results tables and their text / CSV / JSON renderings.
//!
//! Numbers are printed with three decimals and absent values as `-`.
//!
//! CSV columns for results tables:
//! `model,train,eval,f1_macro,roc_auc,accuracy,best_f1_macro,best_roc_auc,best_accuracy`.
//! CSV columns for heatmaps: `gold,<predicted label>...`.
//! CSV columns for dominance matrices: `layer,model,<model>...` with layers
//! `eps_min`, `dominant` and `better`.

use std::collections::{BTreeSet, HashSet};
use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::cross_balance::CrossBalancedResult;
use crate::error::{Error, Result};
use crate::metrics::{ConfusionMatrix, Metric, MetricsBundle};
use crate::significance::{best_set, DominanceMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Csv,
    Structured,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "text" => Ok(Format::Text),
            "csv" => Ok(Format::Csv),
            "structured" | "json" => Ok(Format::Structured),
            other => Err(Error::UnknownFormat(other.to_string())),
        }
    }
}

fn fmt3(x: f64) -> String {
    format!("{x:.3}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map_or_else(|| "-".to_string(), fmt3)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeatmapTable {
    pub labels: Vec<String>,
    /// `[gold][predicted]` share of all instances.
    pub cells: Vec<Vec<f64>>,
}

impl HeatmapTable {
    pub fn total(&self) -> f64 {
        self.cells.iter().flatten().sum()
    }
}

fn proportions(cm: &ConfusionMatrix) -> Result<Vec<Vec<f64>>> {
    let total = cm.total();
    if total == 0 {
        return Err(Error::NoInstances);
    }
    Ok(cm
        .counts
        .iter()
        .map(|row| row.iter().map(|&c| c as f64 / total as f64).collect())
        .collect())
}

fn check_labels(labels: &[String], classes: usize) -> Result<()> {
    if labels.len() != classes {
        return Err(Error::LengthMismatch {
            left: labels.len(),
            right: classes,
        });
    }
    Ok(())
}

pub fn heatmap(cm: &ConfusionMatrix, labels: &[String]) -> Result<HeatmapTable> {
    check_labels(labels, cm.classes)?;
    Ok(HeatmapTable {
        labels: labels.to_vec(),
        cells: proportions(cm)?,
    })
}

/// Mean of the per-iteration proportion matrices.
pub fn cross_balanced_heatmap(result: &CrossBalancedResult, labels: &[String]) -> Result<HeatmapTable> {
    let k = result.plan.classes;
    check_labels(labels, k)?;
    if result.per_iteration.is_empty() {
        return Err(Error::NoInstances);
    }
    let mut cells = vec![vec![0.0; k]; k];
    for (i, it) in result.per_iteration.iter().enumerate() {
        let p = proportions(&it.confusion)?;
        for g in 0..k {
            for q in 0..k {
                cells[g][q] += (p[g][q] - cells[g][q]) / (i + 1) as f64;
            }
        }
    }
    Ok(HeatmapTable {
        labels: labels.to_vec(),
        cells,
    })
}

pub fn render_heatmap(table: &HeatmapTable, format: Format) -> Result<String> {
    match format {
        Format::Text => {
            let width = table.labels.iter().map(|l| l.len()).max().unwrap_or(0).max(5);
            let mut out = String::new();
            let _ = write!(out, "{:width$}", "gold \\ pred");
            for l in &table.labels {
                let _ = write!(out, "  {l:>width$}");
            }
            out.push('\n');
            for (l, row) in table.labels.iter().zip(&table.cells) {
                let _ = write!(out, "{l:width$}");
                for v in row {
                    let _ = write!(out, "  {:>width$}", fmt3(*v));
                }
                out.push('\n');
            }
            Ok(out)
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let mut header = vec!["gold".to_string()];
            header.extend(table.labels.iter().cloned());
            w.write_record(&header)?;
            for (l, row) in table.labels.iter().zip(&table.cells) {
                let mut rec = vec![l.clone()];
                rec.extend(row.iter().map(|v| v.to_string()));
                w.write_record(&rec)?;
            }
            csv_string(w)
        }
        Format::Structured => Ok(serde_json::to_string_pretty(table)? + "\n"),
    }
}

fn csv_string(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EvalMode {
    #[serde(rename = "cross-balanced")]
    CrossBalanced,
    #[serde(rename = "standard")]
    Standard,
}

impl EvalMode {
    pub const ALL: [EvalMode; 2] = [EvalMode::CrossBalanced, EvalMode::Standard];

    pub fn name(self) -> &'static str {
        match self {
            EvalMode::CrossBalanced => "cross-balanced",
            EvalMode::Standard => "standard",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Descriptor {
    pub model: String,
    /// Training setup, e.g. `bal` or `full`.
    pub train: String,
    pub eval: EvalMode,
}

impl Descriptor {
    pub fn new(model: impl Into<String>, train: impl Into<String>, eval: EvalMode) -> Self {
        Self {
            model: model.into(),
            train: train.into(),
            eval,
        }
    }

    /// Identifier of the table row, used as the model id in dominance
    /// matrices: `model-train`, or just `model` without a train setup.
    pub fn row_key(&self) -> String {
        row_key(&self.model, &self.train)
    }
}

pub fn row_key(model: &str, train: &str) -> String {
    if train.is_empty() {
        model.to_string()
    } else {
        format!("{model}-{train}")
    }
}

/// Significance results for one column of the table.
#[derive(Debug, Clone, PartialEq)]
pub struct ColumnDominance {
    pub eval: EvalMode,
    pub matrix: DominanceMatrix,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableEntry {
    pub descriptor: Descriptor,
    pub bundle: MetricsBundle,
    /// Metrics for which this entry is in the best set.
    pub best: BTreeSet<Metric>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultsTable {
    pub entries: Vec<TableEntry>,
}

pub fn results_table(entries: Vec<(Descriptor, MetricsBundle)>, dominance: &[ColumnDominance]) -> Result<ResultsTable> {
    let mut seen = HashSet::new();
    for (d, _) in &entries {
        if !seen.insert(d.clone()) {
            return Err(Error::DuplicateDescriptor(format!(
                "{} / {}",
                d.row_key(),
                d.eval.name()
            )));
        }
    }
    let mut marks: HashSet<(String, EvalMode, Metric)> = HashSet::new();
    for col in dominance {
        let metric: Metric = col.matrix.metric.parse()?;
        for key in best_set(&col.matrix) {
            marks.insert((key, col.eval, metric));
        }
    }
    let entries = entries
        .into_iter()
        .map(|(descriptor, bundle)| {
            let best = Metric::ALL
                .into_iter()
                .filter(|&m| bundle.metric(m).is_some())
                .filter(|&m| marks.contains(&(descriptor.row_key(), descriptor.eval, m)))
                .collect();
            TableEntry {
                descriptor,
                bundle,
                best,
            }
        })
        .collect();
    Ok(ResultsTable { entries })
}

const CSV_HEADER: [&str; 9] = [
    "model",
    "train",
    "eval",
    "f1_macro",
    "roc_auc",
    "accuracy",
    "best_f1_macro",
    "best_roc_auc",
    "best_accuracy",
];

pub fn render(table: &ResultsTable, format: Format) -> Result<String> {
    match format {
        Format::Text => Ok(render_text(table)),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(CSV_HEADER)?;
            for e in &table.entries {
                let mut rec = vec![
                    e.descriptor.model.clone(),
                    e.descriptor.train.clone(),
                    e.descriptor.eval.name().to_string(),
                ];
                rec.extend(Metric::ALL.iter().map(|&m| fmt_opt(e.bundle.metric(m))));
                rec.extend(Metric::ALL.iter().map(|m| e.best.contains(m).to_string()));
                w.write_record(&rec)?;
            }
            csv_string(w)
        }
        Format::Structured => Ok(serde_json::to_string_pretty(table)? + "\n"),
    }
}

/// Side-by-side layout: one line per (model, train) with a column group
/// per evaluation mode. `*` marks the best set of a column.
fn render_text(table: &ResultsTable) -> String {
    let modes: Vec<EvalMode> = EvalMode::ALL
        .into_iter()
        .filter(|m| table.entries.iter().any(|e| e.descriptor.eval == *m))
        .collect();
    let modes = if modes.is_empty() {
        EvalMode::ALL.to_vec()
    } else {
        modes
    };

    let mut rows: Vec<(String, String)> = Vec::new();
    for e in &table.entries {
        let key = (e.descriptor.model.clone(), e.descriptor.train.clone());
        if !rows.contains(&key) {
            rows.push(key);
        }
    }
    let model_w = rows.iter().map(|r| r.0.len()).max().unwrap_or(0).max(5);
    let train_w = rows.iter().map(|r| r.1.len()).max().unwrap_or(0).max(5);
    const CELL: usize = 9;
    let group_w = 3 * CELL + 2;

    let mut out = String::new();
    let _ = write!(out, "{:model_w$}  {:train_w$}", "", "");
    for m in &modes {
        let _ = write!(out, " | {:^group_w$}", m.name());
    }
    out.push('\n');
    let _ = write!(out, "{:model_w$}  {:train_w$}", "model", "train");
    for _ in &modes {
        let _ = write!(out, " | ");
        let titles: Vec<String> = Metric::ALL.iter().map(|m| format!("{:>CELL$}", m.title())).collect();
        out.push_str(&titles.join(" "));
    }
    out.push('\n');
    let rule = model_w + 2 + train_w + modes.len() * (group_w + 3);
    out.push_str(&"-".repeat(rule));
    out.push('\n');

    let mut any_marked = false;
    for (model, train) in &rows {
        let _ = write!(out, "{model:model_w$}  {train:train_w$}");
        for mode in &modes {
            let entry = table
                .entries
                .iter()
                .find(|e| &e.descriptor.model == model && &e.descriptor.train == train && e.descriptor.eval == *mode);
            let _ = write!(out, " | ");
            let cells: Vec<String> = Metric::ALL
                .iter()
                .map(|&m| {
                    let text = match entry {
                        Some(e) => {
                            let marked = e.best.contains(&m);
                            any_marked |= marked;
                            format!("{}{}", fmt_opt(e.bundle.metric(m)), if marked { "*" } else { " " })
                        }
                        None => "- ".to_string(),
                    };
                    format!("{text:>CELL$}")
                })
                .collect();
            out.push_str(&cells.join(" "));
        }
        out.push('\n');
    }
    if any_marked {
        out.push_str("* best in column; co-marked entries are not significantly different\n");
    }
    out
}

/// One row of a comparison against externally reported systems.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub model: String,
    pub classes: String,
    pub evaluation: String,
    pub accuracy: f64,
}

pub fn render_comparison(rows: &[ComparisonRow], format: Format) -> Result<String> {
    match format {
        Format::Text => {
            let mw = rows.iter().map(|r| r.model.len()).max().unwrap_or(0).max(5);
            let cw = rows.iter().map(|r| r.classes.len()).max().unwrap_or(0).max(7);
            let ew = rows.iter().map(|r| r.evaluation.len()).max().unwrap_or(0).max(10);
            let mut out = format!(
                "{:mw$}  {:cw$}  {:ew$}  {:>8}\n",
                "model", "classes", "evaluation", "accuracy"
            );
            for r in rows {
                let _ = writeln!(
                    out,
                    "{:mw$}  {:cw$}  {:ew$}  {:>8}",
                    r.model,
                    r.classes,
                    r.evaluation,
                    fmt3(r.accuracy)
                );
            }
            Ok(out)
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["model", "classes", "evaluation", "accuracy"])?;
            for r in rows {
                w.write_record([&r.model, &r.classes, &r.evaluation, &fmt3(r.accuracy)])?;
            }
            csv_string(w)
        }
        Format::Structured => Ok(serde_json::to_string_pretty(rows)? + "\n"),
    }
}

type Cell<'a> = Box<dyn Fn(usize, usize) -> String + 'a>;

pub fn render_dominance(matrix: &DominanceMatrix, format: Format) -> Result<String> {
    let layers: [(&str, Cell); 3] = [
        ("eps_min", Box::new(|a, b| fmt3(matrix.eps_min[a][b]))),
        ("dominant", Box::new(|a, b| matrix.dominant[a][b].to_string())),
        ("better", Box::new(|a, b| matrix.better[a][b].to_string())),
    ];
    let m = matrix.models.len();
    match format {
        Format::Text => {
            let w = matrix.models.iter().map(|s| s.len()).max().unwrap_or(0).max(8);
            let mut out = format!(
                "metric {}  alpha' = {:.6}  ({} ordered comparisons)\n",
                matrix.metric,
                matrix.alpha_adjusted,
                m * m.saturating_sub(1)
            );
            for (name, cell) in &layers {
                let _ = write!(out, "\n{name:w$}");
                for model in &matrix.models {
                    let _ = write!(out, "  {model:>w$}");
                }
                out.push('\n');
                for a in 0..m {
                    let _ = write!(out, "{:w$}", matrix.models[a]);
                    for b in 0..m {
                        let v = if a == b { "-".to_string() } else { cell(a, b) };
                        let _ = write!(out, "  {v:>w$}");
                    }
                    out.push('\n');
                }
            }
            let _ = writeln!(out, "\nbest: {}", best_set(matrix).join(", "));
            Ok(out)
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let mut header = vec!["layer".to_string(), "model".to_string()];
            header.extend(matrix.models.iter().cloned());
            w.write_record(&header)?;
            for (name, cell) in &layers {
                for a in 0..m {
                    let mut rec = vec![name.to_string(), matrix.models[a].clone()];
                    rec.extend((0..m).map(|b| if a == b { "-".to_string() } else { cell(a, b) }));
                    w.write_record(&rec)?;
                }
            }
            csv_string(w)
        }
        Format::Structured => Ok(serde_json::to_string_pretty(matrix)? + "\n"),
    }
}
