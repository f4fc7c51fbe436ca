mod config;

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use crossbal::baselines::{fit_lexical, fit_majority, predict_lexical, predict_majority};
use crossbal::cross_balance::CrossBalanceOptions;
use crossbal::dataset::{
    adapt, distribution, downsample, parse_split, write_split, ClassDistribution, DatasetSplit, FieldMapping,
    LabelSchema,
};
use crossbal::evaluation::{
    evaluate, group_by_row, seed_average, seed_scores, EvaluationRecord, EvaluationSettings, ModeSelection,
};
use crossbal::metrics::Metric;
use crossbal::predictions::{load_predictions, write_predictions, PredictionKind};
use crossbal::report::{
    cross_balanced_heatmap, heatmap, render, render_dominance, render_heatmap, results_table, ColumnDominance,
    Descriptor, EvalMode, Format,
};
use crossbal::significance::{compare_all, AsoConfig, ScoreSample};
use crossbal::thresholds::ThresholdSpec;

use crate::config::{resolve_seeds, FileConfig};

#[derive(Parser)]
#[command(
    name = "crossbal",
    version,
    about = "Cross-balanced evaluation harness for sentence-pair classification"
)]
struct Cli {
    /// Optional TOML config (seeds, thresholds, aso); flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Drop the extreme classes, remap to 3 classes and optionally down-sample.
    Adapt(AdaptArgs),
    /// Print the class distribution of a dataset file.
    Stats(StatsArgs),
    /// Score a prediction file against a dataset split.
    Evaluate(EvaluateArgs),
    /// Same as `evaluate --mode cross-balanced`.
    CrossEval(EvaluateArgs),
    /// Write reference predictions (majority or lexical).
    Baseline(BaselineArgs),
    /// Rank models with ASO tests over their per-seed results.
    Compare(CompareArgs),
    /// Render a results table (and optionally heatmaps) from result files.
    Report(ReportArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum SchemaArg {
    Original,
    Adapted,
}

impl From<SchemaArg> for LabelSchema {
    fn from(s: SchemaArg) -> Self {
        match s {
            SchemaArg::Original => LabelSchema::Original,
            SchemaArg::Adapted => LabelSchema::Adapted,
        }
    }
}

#[derive(Args)]
struct DatasetArgs {
    /// Field renames as canonical=source (id, sentence1, sentence2, modifier, label).
    #[arg(long = "map", value_name = "CANONICAL=SOURCE")]
    mapping: Vec<String>,
    /// Split name, used for synthesized ids; defaults to the file stem.
    #[arg(long)]
    split_name: Option<String>,
}

#[derive(Args)]
struct AdaptArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: PathBuf,
    /// Keep only COUNT records of CLASS, e.g. `equally_likely:1500`.
    #[arg(long, value_name = "CLASS:COUNT")]
    downsample: Option<String>,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[command(flatten)]
    dataset: DatasetArgs,
}

#[derive(Args)]
struct StatsArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "adapted")]
    schema: SchemaArg,
    #[command(flatten)]
    dataset: DatasetArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Standard,
    CrossBalanced,
    Both,
}

#[derive(Args)]
struct EvaluateArgs {
    /// Adapted dataset split.
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    predictions: PathBuf,
    #[arg(long, value_enum, default_value = "both")]
    mode: ModeArg,
    #[arg(long)]
    lower: Option<f64>,
    #[arg(long)]
    upper: Option<f64>,
    /// Training setup label stored with the result (e.g. bal, full).
    #[arg(long, default_value = "")]
    train_setup: String,
    /// Shuffle instances within each class before cross-balancing.
    #[arg(long)]
    shuffle_seed: Option<u64>,
    /// Structured result file.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Heatmap CSV (cross-balanced average when available).
    #[arg(long)]
    heatmap_out: Option<PathBuf>,
    #[command(flatten)]
    dataset: DatasetArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum BaselineKind {
    Majority,
    Lexical,
}

#[derive(Args)]
struct BaselineArgs {
    #[arg(long, value_enum)]
    kind: BaselineKind,
    /// Adapted training split.
    #[arg(long)]
    train: PathBuf,
    /// Adapted split to predict.
    #[arg(long)]
    data: PathBuf,
    /// Single seed; without it every seed of the seed list is run.
    #[arg(long)]
    seed: Option<u64>,
    /// Comma-separated seed list (default: CROSSBAL_SEEDS, config, or 6,17,42).
    #[arg(long)]
    seeds: Option<String>,
    /// Output path; `{seed}` is replaced by the seed.
    #[arg(long)]
    out: String,
    #[arg(long)]
    model_name: Option<String>,
}

#[derive(Args)]
struct AsoArgs {
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    tau: Option<f64>,
    #[arg(long)]
    bootstrap: Option<usize>,
    #[arg(long)]
    aso_seed: Option<u64>,
}

impl AsoArgs {
    fn resolve(&self, file: &FileConfig) -> Result<AsoConfig> {
        let cfg = AsoConfig {
            alpha: self.alpha.unwrap_or(file.aso.alpha),
            tau: self.tau.unwrap_or(file.aso.tau),
            bootstrap_count: self.bootstrap.unwrap_or(file.aso.bootstrap_count),
            seed: self.aso_seed.unwrap_or(file.aso.seed),
            integration: file.aso.integration,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum EvalArg {
    Standard,
    CrossBalanced,
}

impl From<EvalArg> for EvalMode {
    fn from(e: EvalArg) -> Self {
        match e {
            EvalArg::Standard => EvalMode::Standard,
            EvalArg::CrossBalanced => EvalMode::CrossBalanced,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Text,
    Csv,
    Json,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Text => Format::Text,
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Structured,
        }
    }
}

#[derive(Args)]
struct CompareArgs {
    /// Result files written by `evaluate --out`; grouped by model and train setup.
    #[arg(required = true)]
    results: Vec<PathBuf>,
    /// Metrics to test (default: every metric at least two models report).
    #[arg(long = "metric", value_parser = parse_metric)]
    metrics: Vec<Metric>,
    #[arg(long = "eval", value_enum, default_value = "cross-balanced")]
    eval: EvalArg,
    #[arg(long, value_enum, default_value = "text")]
    format: FormatArg,
    #[command(flatten)]
    aso: AsoArgs,
}

#[derive(Args)]
struct ReportArgs {
    #[arg(required = true)]
    results: Vec<PathBuf>,
    #[arg(long, value_enum, default_value = "text")]
    format: FormatArg,
    /// Also print a confusion heatmap per result file.
    #[arg(long)]
    heatmap: bool,
    /// Skip ASO best-set marking.
    #[arg(long)]
    no_significance: bool,
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    aso: AsoArgs,
}

fn parse_metric(s: &str) -> Result<Metric, String> {
    s.parse().map_err(|e: crossbal::Error| e.to_string())
}

fn open(path: &Path) -> Result<BufReader<File>> {
    Ok(BufReader::new(
        File::open(path).with_context(|| format!("opening {}", path.display()))?,
    ))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(
        File::create(path).with_context(|| format!("creating {}", path.display()))?,
    ))
}

fn split_name(path: &Path, args: &DatasetArgs) -> String {
    args.split_name.clone().unwrap_or_else(|| {
        path.file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "split".into())
    })
}

fn read_split(path: &Path, schema: LabelSchema, args: &DatasetArgs) -> Result<DatasetSplit> {
    let mapping = FieldMapping::from_pairs(args.mapping.iter().map(String::as_str))?;
    parse_split(open(path)?, &split_name(path, args), schema, &mapping)
        .with_context(|| format!("reading dataset {}", path.display()))
}

fn read_adapted(path: &Path) -> Result<DatasetSplit> {
    read_split(
        path,
        LabelSchema::Adapted,
        &DatasetArgs {
            mapping: vec![],
            split_name: None,
        },
    )
}

fn print_distribution(schema: LabelSchema, dist: &ClassDistribution) {
    println!("{:<18} {:>7} {:>6}", "class", "count", "share");
    for (c, name) in schema.labels().iter().enumerate() {
        println!("{:<18} {:>7} {:>6.2}", name, dist.counts[c], dist.proportions[c]);
    }
    println!("{:<18} {:>7}", "total", dist.total());
}

fn cmd_adapt(args: AdaptArgs) -> Result<()> {
    let split = read_split(&args.input, LabelSchema::Original, &args.dataset)?;
    let mut adapted = adapt(&split)?;
    if let Some(spec) = &args.downsample {
        let (class, count) = spec
            .split_once(':')
            .ok_or_else(|| anyhow!("--downsample expects CLASS:COUNT, got {spec:?}"))?;
        let class = LabelSchema::Adapted.parse_label(class)?;
        let count: usize = count.parse().with_context(|| format!("bad count {count:?}"))?;
        if adapted.name != "train" {
            log::warn!(
                "down-sampling split {:?}; dev and test are normally kept intact",
                adapted.name
            );
        }
        adapted = downsample(&adapted, class, count, args.seed)?;
    }
    let mut out = create(&args.output)?;
    write_split(&adapted, &mut out)?;
    out.flush()?;
    print_distribution(adapted.schema, &distribution(&adapted));
    Ok(())
}

fn cmd_stats(args: StatsArgs) -> Result<()> {
    let split = read_split(&args.input, args.schema.into(), &args.dataset)?;
    print_distribution(split.schema, &distribution(&split));
    Ok(())
}

fn cmd_evaluate(args: EvaluateArgs, file: &FileConfig) -> Result<()> {
    let split = read_split(&args.data, LabelSchema::Adapted, &args.dataset)?;
    let preds = load_predictions(open(&args.predictions)?)
        .with_context(|| format!("reading predictions {}", args.predictions.display()))?;
    let thresholds = ThresholdSpec::new(
        args.lower.unwrap_or(file.thresholds.lower),
        args.upper.unwrap_or(file.thresholds.upper),
        file.thresholds.targets.clone(),
    )?;
    let mode = match args.mode {
        ModeArg::Standard => ModeSelection::Standard,
        ModeArg::CrossBalanced => ModeSelection::CrossBalanced,
        ModeArg::Both => ModeSelection::Both,
    };
    let settings = EvaluationSettings {
        thresholds,
        cross_balance: CrossBalanceOptions {
            shuffle_seed: args.shuffle_seed,
        },
        train_setup: args.train_setup,
    };
    let record = evaluate(&split, &preds, mode, &settings)?;
    if preds.kind == PredictionKind::Scalar {
        eprintln!(
            "warning: {} emits scalar scores; ROC-AUC is not reported",
            preds.model_name
        );
    }

    let entries: Vec<(Descriptor, _)> = EvalMode::ALL
        .into_iter()
        .filter_map(|m| {
            record
                .bundle(m)
                .map(|b| (Descriptor::new(&record.model_name, &record.train_setup, m), b.clone()))
        })
        .collect();
    print!("{}", render(&results_table(entries, &[])?, Format::Text)?);
    if let Some(cb) = &record.cross_balanced {
        println!("cross-balanced: s = {}, r = {}", cb.plan.s, cb.plan.r);
    }

    if let Some(path) = &args.out {
        let mut w = create(path)?;
        serde_json::to_writer_pretty(&mut w, &record)?;
        w.write_all(b"\n")?;
        w.flush()?;
    }
    if let Some(path) = &args.heatmap_out {
        let table = record_heatmap(&record)?;
        std::fs::write(path, render_heatmap(&table, Format::Csv)?)?;
    }
    Ok(())
}

fn record_heatmap(record: &EvaluationRecord) -> Result<crossbal::report::HeatmapTable> {
    if let Some(cb) = &record.cross_balanced {
        Ok(cross_balanced_heatmap(cb, &record.labels)?)
    } else if let Some(std) = &record.standard {
        Ok(heatmap(&std.confusion, &record.labels)?)
    } else {
        bail!("result has no evaluation")
    }
}

fn cmd_baseline(args: BaselineArgs, file: &FileConfig) -> Result<()> {
    let train = read_adapted(&args.train)?;
    let data = read_adapted(&args.data)?;
    let seeds = match args.seed {
        Some(s) => vec![s],
        None => resolve_seeds(args.seeds.as_deref(), file)?,
    };
    if seeds.len() > 1 && !args.out.contains("{seed}") {
        bail!("--out must contain {{seed}} when writing several seeds");
    }
    for seed in seeds {
        let mut set = match args.kind {
            BaselineKind::Majority => predict_majority(&fit_majority(&train)?, &data),
            BaselineKind::Lexical => predict_lexical(&fit_lexical(&train, seed)?, &data),
        };
        set.seed = seed;
        if let Some(name) = &args.model_name {
            set.model_name = name.clone();
        }
        let path = PathBuf::from(args.out.replace("{seed}", &seed.to_string()));
        let mut w = create(&path)?;
        write_predictions(&set, &mut w)?;
        w.flush()?;
        println!("wrote {} predictions to {}", set.len(), path.display());
    }
    Ok(())
}

fn load_records(paths: &[PathBuf]) -> Result<Vec<EvaluationRecord>> {
    paths
        .iter()
        .map(|p| serde_json::from_reader(open(p)?).with_context(|| format!("reading result {}", p.display())))
        .collect()
}

/// Score samples for the rows that report `metric` under `mode`.
fn samples_for(groups: &[(String, Vec<&EvaluationRecord>)], mode: EvalMode, metric: Metric) -> Vec<ScoreSample> {
    groups
        .iter()
        .filter_map(|(key, recs)| seed_scores(recs, mode, metric).map(|s| ScoreSample::new(key, metric.name(), s)))
        .collect()
}

fn check_seed_counts(groups: &[(String, Vec<&EvaluationRecord>)]) -> Result<()> {
    for (key, recs) in groups {
        if recs.len() < 2 {
            bail!(
                "model {key} has {} seed(s); at least 2 are needed for significance testing",
                recs.len()
            );
        }
    }
    Ok(())
}

fn cmd_compare(args: CompareArgs, file: &FileConfig) -> Result<()> {
    let cfg = args.aso.resolve(file)?;
    let records = load_records(&args.results)?;
    let groups = group_by_row(&records);
    if groups.len() < 2 {
        bail!("need results for at least 2 models, got {}", groups.len());
    }
    check_seed_counts(&groups)?;
    let mode: EvalMode = args.eval.into();
    let metrics = if args.metrics.is_empty() {
        Metric::ALL.to_vec()
    } else {
        args.metrics.clone()
    };
    let format: Format = args.format.into();
    for metric in metrics {
        let samples = samples_for(&groups, mode, metric);
        if samples.len() < groups.len() {
            let missing: Vec<&str> = groups
                .iter()
                .map(|(k, _)| k.as_str())
                .filter(|k| !samples.iter().any(|s| s.model_id == *k))
                .collect();
            if !args.metrics.is_empty() {
                log::warn!(
                    "{} under {} evaluation is missing for {}",
                    metric.name(),
                    mode.name(),
                    missing.join(", ")
                );
            }
        }
        if samples.len() < 2 {
            if !args.metrics.is_empty() {
                bail!(
                    "metric {} is reported by fewer than 2 models under {} evaluation",
                    metric.name(),
                    mode.name()
                );
            }
            continue;
        }
        let matrix = compare_all(&samples, &cfg)?;
        if format == Format::Text {
            println!("== {} evaluation ==", mode.name());
        }
        print!("{}", render_dominance(&matrix, format)?);
        if format == Format::Text {
            for a in 0..matrix.models.len() {
                for b in a + 1..matrix.models.len() {
                    let verdict = if matrix.better[a][b] {
                        format!("{} better", matrix.models[a])
                    } else if matrix.better[b][a] {
                        format!("{} better", matrix.models[b])
                    } else {
                        "insignificant".to_string()
                    };
                    println!("{} vs {}: {verdict}", matrix.models[a], matrix.models[b]);
                }
            }
            println!();
        }
    }
    Ok(())
}

fn cmd_report(args: ReportArgs, file: &FileConfig) -> Result<()> {
    let records = load_records(&args.results)?;
    let groups = group_by_row(&records);
    let mut entries = Vec::new();
    for (_, recs) in &groups {
        for mode in EvalMode::ALL {
            if let Some(b) = seed_average(recs, mode) {
                entries.push((Descriptor::new(&recs[0].model_name, &recs[0].train_setup, mode), b));
            }
        }
    }

    let mut dominance = Vec::new();
    let testable = groups.len() >= 2 && groups.iter().all(|(_, r)| r.len() >= 2);
    if !args.no_significance && testable {
        let cfg = args.aso.resolve(file)?;
        for mode in EvalMode::ALL {
            for metric in Metric::ALL {
                let samples = samples_for(&groups, mode, metric);
                if samples.len() >= 2 {
                    dominance.push(ColumnDominance {
                        eval: mode,
                        matrix: compare_all(&samples, &cfg)?,
                    });
                }
            }
        }
    } else if !args.no_significance {
        log::warn!("best-set marking needs at least 2 models with 2 or more seeds each");
    }

    let format: Format = args.format.into();
    let mut out = render(&results_table(entries, &dominance)?, format)?;
    if args.heatmap {
        for r in &records {
            let mode = if r.cross_balanced.is_some() {
                "cross-balanced"
            } else {
                "standard"
            };
            if format == Format::Text {
                out.push_str(&format!("\n{} seed {} ({mode})\n", r.row_key(), r.seed));
            }
            out.push_str(&render_heatmap(&record_heatmap(r)?, format)?);
        }
    }
    match &args.out {
        Some(path) => std::fs::write(path, out)?,
        None => print!("{out}"),
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    let file = FileConfig::load(cli.config.as_deref())?;
    match cli.command {
        Command::Adapt(a) => cmd_adapt(a),
        Command::Stats(a) => cmd_stats(a),
        Command::Evaluate(a) => cmd_evaluate(a, &file),
        Command::CrossEval(mut a) => {
            a.mode = ModeArg::CrossBalanced;
            cmd_evaluate(a, &file)
        }
        Command::Baseline(a) => cmd_baseline(a, &file),
        Command::Compare(a) => cmd_compare(a, &file),
        Command::Report(a) => cmd_report(a, &file),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
