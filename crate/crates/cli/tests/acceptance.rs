//! Acceptance suite. Each criterion runs against its tolerance and runtime
//! bound and prints one PASS/FAIL line; the test fails if any criterion does.
//!
//! Run with `cargo test -p crossbal-cli --test acceptance -- --nocapture`.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use crossbal::baselines::{fit_majority, predict_majority};
use crossbal::cross_balance::{window_offsets, CrossBalanceOptions, CrossBalancePlan};
use crossbal::dataset::{adapt, distribution, downsample, write_split, DatasetSplit, LabelSchema, SentencePair};
use crossbal::evaluation::{evaluate, EvaluationSettings, ModeSelection};
use crossbal::metrics::{accuracy, confusion, evaluate_standard, f1_macro, per_class, roc_auc_ovr_macro, Instances};
use crossbal::report::EvalMode;
use crossbal::significance::{aso, compare_all, violation_ratio, AsoConfig, Integration, ScoreSample};
use crossbal::thresholds::{label_to_target, score_to_label, ThresholdSpec};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<(), String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($msg)+));
        }
    };
}

fn close(x: f64, want: f64, tol: f64) -> bool {
    (x - want).abs() <= tol
}

fn pair(split: &str, i: usize, modifier: &str, label: usize) -> SentencePair {
    SentencePair {
        id: format!("{split}-{i}"),
        sentence1: format!("a horse {i} runs"),
        sentence2: format!("a {modifier} horse {i} runs"),
        modifier: modifier.to_string(),
        label,
    }
}

/// Records in blocks of equal labels, shuffled when `rng` is given.
fn split_from_counts(name: &str, schema: LabelSchema, counts: &[usize], rng: Option<&mut ChaCha8Rng>) -> DatasetSplit {
    let mut labels: Vec<usize> = counts
        .iter()
        .enumerate()
        .flat_map(|(c, &n)| std::iter::repeat_n(c, n))
        .collect();
    if let Some(r) = rng {
        labels.shuffle(r);
    }
    let records = labels
        .iter()
        .enumerate()
        .map(|(i, &l)| pair(name, i, "odd", l))
        .collect();
    DatasetSplit::new(name, schema, records)
}

fn majority_standard(train: &DatasetSplit, eval: &DatasetSplit, mode: ModeSelection) -> Result<(f64, f64), String> {
    let model = fit_majority(train).map_err(|e| e.to_string())?;
    let preds = predict_majority(&model, eval);
    let rec = evaluate(eval, &preds, mode, &EvaluationSettings::default()).map_err(|e| e.to_string())?;
    let regime = if mode == ModeSelection::CrossBalanced {
        EvalMode::CrossBalanced
    } else {
        EvalMode::Standard
    };
    let b = rec.bundle(regime).ok_or("missing bundle")?;
    if b.roc_auc.is_some() {
        return Err("constant predictor reported a ROC-AUC".into());
    }
    Ok((b.accuracy, b.f1_macro))
}

fn criterion_1() -> Check {
    let eval = split_from_counts("test", LabelSchema::Adapted, &[128, 798, 74], None);
    let train = split_from_counts("train", LabelSchema::Adapted, &[140, 780, 80], None);
    let (acc, f1) = majority_standard(&train, &eval, ModeSelection::Standard)?;
    ensure!(close(acc, 0.798, 1e-3), "accuracy {acc}");
    ensure!(close(f1, 0.296, 1e-3), "F1-macro {f1}");
    Ok(())
}

fn criterion_2() -> Check {
    let train = split_from_counts("train", LabelSchema::Adapted, &[1500, 1500, 947], None);
    let eval = split_from_counts("test", LabelSchema::Adapted, &[73, 798, 129], None);
    let (acc, f1) = majority_standard(&train, &eval, ModeSelection::Standard)?;
    ensure!(close(acc, 0.073, 1e-3), "accuracy {acc}");
    ensure!(close(f1, 0.045, 1e-3), "F1-macro {f1}");
    Ok(())
}

fn criterion_3() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for case in 0..100 {
        let counts: Vec<usize> = (0..3).map(|_| rng.random_range(1..=200)).collect();
        let train_counts: Vec<usize> = (0..3).map(|_| rng.random_range(1..=200)).collect();
        let eval = split_from_counts("dev", LabelSchema::Adapted, &counts, Some(&mut rng));
        let train = split_from_counts("train", LabelSchema::Adapted, &train_counts, None);
        let (acc, f1) = majority_standard(&train, &eval, ModeSelection::CrossBalanced)?;
        ensure!(acc == 1.0 / 3.0, "case {case} {counts:?}: accuracy {acc:e}");
        ensure!(close(f1, 1.0 / 6.0, 1e-9), "case {case} {counts:?}: F1-macro {f1:e}");
    }
    Ok(())
}

fn criterion_4() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for case in 0..1000 {
        let counts: Vec<usize> = (0..3).map(|_| rng.random_range(1..=500)).collect();
        let mut labels: Vec<usize> = counts
            .iter()
            .enumerate()
            .flat_map(|(c, &n)| std::iter::repeat_n(c, n))
            .collect();
        labels.shuffle(&mut rng);
        let plan = CrossBalancePlan::from_labels(&labels, 3).map_err(|e| e.to_string())?;
        let s = *counts.iter().min().unwrap();
        ensure!(plan.s == s, "case {case}: s = {}", plan.s);
        let mut seen = vec![0usize; labels.len()];
        for i in 0..plan.r {
            for c in 0..3 {
                let w = plan.window(c, i).map_err(|e| e.to_string())?;
                ensure!(
                    w.len() == s,
                    "case {case}: window {i} of class {c} has {} members",
                    w.len()
                );
                for p in w {
                    ensure!(labels[p] == c, "case {case}: position {p} is not class {c}");
                    seen[p] += 1;
                }
            }
        }
        for c in 0..3 {
            let uses: Vec<usize> = labels
                .iter()
                .zip(&seen)
                .filter(|(l, _)| **l == c)
                .map(|(_, &u)| u)
                .collect();
            let (lo, hi) = (*uses.iter().min().unwrap(), *uses.iter().max().unwrap());
            ensure!(lo >= 1, "case {case} {counts:?}: class {c} has an unused instance");
            ensure!(hi - lo <= 1, "case {case} {counts:?}: class {c} usage spans {lo}..{hi}");
        }
    }

    for case in 0..50 {
        let n = rng.random_range(1..=60);
        let mut gold: Vec<usize> = (0..3).flat_map(|c| std::iter::repeat_n(c, n)).collect();
        gold.shuffle(&mut rng);
        let probs: Vec<Vec<f64>> = gold
            .iter()
            .map(|_| {
                let raw: Vec<f64> = (0..3).map(|_| rng.random_range(1..6) as f64).collect();
                let t: f64 = raw.iter().sum();
                raw.iter().map(|x| x / t).collect()
            })
            .collect();
        let predicted = probs.iter().map(|p| crossbal::predictions::argmax(p)).collect();
        let mut inst = Instances::from_labels(gold, predicted, 3);
        inst.probs = Some(probs);
        let standard = evaluate_standard(&inst).map_err(|e| e.to_string())?;
        let cb = crossbal::cross_balance::evaluate_cross_balanced(&inst, CrossBalanceOptions::default())
            .map_err(|e| e.to_string())?;
        ensure!(cb.plan.r == 1, "balanced case {case}: r = {}", cb.plan.r);
        ensure!(
            cb.mean_bundle == standard.bundle,
            "balanced case {case}: bundles differ"
        );
        ensure!(
            cb.per_iteration[0].confusion == standard.confusion,
            "balanced case {case}: confusion differs"
        );
        let bits = |b: &crossbal::metrics::MetricsBundle| {
            (b.accuracy.to_bits(), b.f1_macro.to_bits(), b.roc_auc.map(f64::to_bits))
        };
        ensure!(
            bits(&cb.mean_bundle) == bits(&standard.bundle),
            "balanced case {case}: not bit-exact"
        );
    }
    ensure!(
        window_offsets(5, 2, 2).collect::<Vec<_>>() == vec![4, 0],
        "wrap-around offsets"
    );
    Ok(())
}

/// Per-definition recount from the label lists.
fn oracle_prf(gold: &[usize], pred: &[usize], k: usize) -> (f64, Vec<(f64, f64, f64)>, f64) {
    let correct = gold.iter().zip(pred).filter(|(g, p)| g == p).count();
    let acc = correct as f64 / gold.len() as f64;
    let scores: Vec<(f64, f64, f64)> = (0..k)
        .map(|c| {
            let tp = gold.iter().zip(pred).filter(|&(&g, &p)| g == c && p == c).count();
            let predicted = pred.iter().filter(|&&p| p == c).count();
            let actual = gold.iter().filter(|&&g| g == c).count();
            let p = if predicted == 0 {
                0.0
            } else {
                tp as f64 / predicted as f64
            };
            let r = if actual == 0 { 0.0 } else { tp as f64 / actual as f64 };
            let f = if p + r == 0.0 { 0.0 } else { 2.0 * p * r / (p + r) };
            (p, r, f)
        })
        .collect();
    let macro_f1 = scores.iter().map(|s| s.2).sum::<f64>() / k as f64;
    (acc, scores, macro_f1)
}

/// Pairwise comparison AUC, ties worth 1/2, averaged over present classes.
fn oracle_auc(gold: &[usize], probs: &[Vec<f64>]) -> f64 {
    let k = probs[0].len();
    let (mut total, mut present) = (0.0, 0);
    for c in 0..k {
        let pos: Vec<f64> = gold
            .iter()
            .zip(probs)
            .filter(|(g, _)| **g == c)
            .map(|(_, p)| p[c])
            .collect();
        let neg: Vec<f64> = gold
            .iter()
            .zip(probs)
            .filter(|(g, _)| **g != c)
            .map(|(_, p)| p[c])
            .collect();
        if pos.is_empty() {
            continue;
        }
        let mut wins = 0.0;
        for &x in &pos {
            for &y in &neg {
                wins += if x > y {
                    1.0
                } else if x == y {
                    0.5
                } else {
                    0.0
                };
            }
        }
        total += wins / (pos.len() * neg.len()) as f64;
        present += 1;
    }
    total / present as f64
}

fn criterion_5() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for case in 0..1000 {
        let k = [2, 3, 5][case % 3];
        let n = rng.random_range(1..=200);
        let gold: Vec<usize> = (0..n).map(|_| rng.random_range(0..k)).collect();
        let pred: Vec<usize> = (0..n).map(|_| rng.random_range(0..k)).collect();
        let cm = confusion(&gold, &pred, k).map_err(|e| e.to_string())?;
        let (acc, scores, macro_f1) = oracle_prf(&gold, &pred, k);
        ensure!(accuracy(&cm).unwrap() == acc, "case {case}: accuracy");
        ensure!(f1_macro(&cm).unwrap() == macro_f1, "case {case}: F1-macro");
        for (c, (s, o)) in per_class(&cm).iter().zip(&scores).enumerate() {
            ensure!((s.precision, s.recall, s.f1) == *o, "case {case}: class {c} P/R/F1");
        }
    }
    let mut ties = 0;
    for case in 0..500 {
        let k = rng.random_range(2..=4);
        let n = rng.random_range(2..=50);
        let mut gold: Vec<usize> = (0..n).map(|_| rng.random_range(0..k)).collect();
        if gold.iter().all(|&g| g == gold[0]) {
            gold[0] = (gold[0] + 1) % k;
        }
        // few distinct values so tied scores are common
        let probs: Vec<Vec<f64>> = (0..n)
            .map(|_| {
                let raw: Vec<f64> = (0..k).map(|_| rng.random_range(1..5) as f64).collect();
                let t: f64 = raw.iter().sum();
                raw.iter().map(|x| x / t).collect()
            })
            .collect();
        let column: Vec<u64> = probs.iter().map(|p| p[0].to_bits()).collect();
        if column.iter().enumerate().any(|(i, x)| column[..i].contains(x)) {
            ties += 1;
        }
        let got = roc_auc_ovr_macro(&gold, &probs).map_err(|e| e.to_string())?;
        let want = oracle_auc(&gold, &probs);
        ensure!(got == want, "case {case}: AUC {got} vs {want}");
    }
    ensure!(ties > 100, "only {ties} instances contained tied scores");
    Ok(())
}

fn criterion_6() -> Check {
    let spec = ThresholdSpec::default();
    for (score, want) in [(0.2, 0), (0.5, 1), (0.9, 2)] {
        let got = score_to_label(score, &spec).map_err(|e| e.to_string())?;
        ensure!(got == want, "{score} mapped to {got}");
    }
    let third = 1.0 / 3.0;
    let two_thirds = 2.0 / 3.0;
    let band = |x: f64| score_to_label(x, &spec).unwrap();
    ensure!(
        band(third) == 1 && band(f64::from_bits(third.to_bits() - 1)) == 0,
        "boundary at 1/3"
    );
    ensure!(
        band(two_thirds) == 2 && band(f64::from_bits(two_thirds.to_bits() - 1)) == 1,
        "boundary at 2/3"
    );
    for (label, target) in [(0, 0.0), (1, 0.5), (2, 1.0)] {
        let t = label_to_target(label, &spec).map_err(|e| e.to_string())?;
        ensure!(t == target, "label {label} target {t}");
        ensure!(band(t) == label, "target {t} maps back to {}", band(t));
    }
    Ok(())
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Midpoint rule on a grid aligned with every step of both empirical
/// quantile functions, each evaluated from its definition.
fn oracle_violation_ratio(a: &[f64], b: &[f64]) -> f64 {
    let cells = 4 * a.len() / gcd(a.len(), b.len()) * b.len();
    let q = |xs: &[f64], t: f64| -> f64 {
        xs.iter()
            .copied()
            .filter(|&x| xs.iter().filter(|&&y| y <= x).count() as f64 / xs.len() as f64 >= t)
            .fold(f64::INFINITY, f64::min)
    };
    let (mut viol, mut total) = (0.0, 0.0);
    for i in 0..cells {
        let t = (i as f64 + 0.5) / cells as f64;
        let d = q(a, t) - q(b, t);
        total += d * d;
        if d < 0.0 {
            viol += d * d;
        }
    }
    if total == 0.0 {
        0.5
    } else {
        viol / total
    }
}

fn criterion_7() -> Check {
    let cfg = AsoConfig::default();
    let sample = |id: &str, xs: &[f64]| ScoreSample::new(id, "f1_macro", xs.to_vec());

    // (a)
    let same = [0.61, 0.58, 0.64];
    let m = compare_all(&[sample("a", &same), sample("b", &same)], &cfg).map_err(|e| e.to_string())?;
    ensure!(
        m.insignificant(0, 1) && !m.dominant[0][1] && !m.dominant[1][0],
        "(a) identical samples"
    );

    // (b)
    let hi = sample("hi", &[1.0, 1.1, 0.9]);
    let lo = sample("lo", &[0.0, 0.1, -0.1]);
    let forward = aso(&hi, &lo, &cfg).map_err(|e| e.to_string())?;
    ensure!(forward.eps_hat == 0.0, "(b) eps_hat {}", forward.eps_hat);
    ensure!(
        forward.eps_min < cfg.tau,
        "(b) eps_min {} not dominant",
        forward.eps_min
    );
    let reverse = aso(&lo, &hi, &cfg).map_err(|e| e.to_string())?;
    ensure!(reverse.eps_hat == 1.0, "(b) reversed eps_hat {}", reverse.eps_hat);
    ensure!(reverse.eps_min >= cfg.tau, "(b) reversed eps_min {}", reverse.eps_min);

    // (c)
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for case in 0..100 {
        let a: Vec<f64> = (0..rng.random_range(2..=6))
            .map(|_| rng.random_range(-1.0..1.0))
            .collect();
        let b: Vec<f64> = (0..rng.random_range(2..=6))
            .map(|_| rng.random_range(-1.0..1.0))
            .collect();
        let got = violation_ratio(&a, &b, Integration::Exact);
        let want = oracle_violation_ratio(&a, &b);
        ensure!(close(got, want, 1e-6), "(c) case {case}: {got} vs {want}");
    }

    // (d)
    let samples: Vec<ScoreSample> = (0..4)
        .map(|i| {
            let x = 0.5 + 0.01 * i as f64;
            sample(&format!("m{i}"), &[x, x + 0.02, x - 0.015, x + 0.004])
        })
        .collect();
    let run = |threads: usize| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| e.to_string())?
            .install(|| compare_all(&samples, &cfg))
            .map_err(|e| e.to_string())
    };
    let bits = |m: &crossbal::significance::DominanceMatrix| -> Vec<u64> {
        m.eps_min.iter().flatten().map(|x| x.to_bits()).collect()
    };
    let one = run(1)?;
    let again = run(1)?;
    let four = run(4)?;
    ensure!(bits(&one) == bits(&again), "(d) rerun differs");
    ensure!(bits(&one) == bits(&four), "(d) thread count changes eps_min");

    // (e)
    ensure!(one.alpha_adjusted == 0.05 / 12.0, "(e) alpha' = {}", one.alpha_adjusted);
    Ok(())
}

fn criterion_8() -> Check {
    let original = split_from_counts("train", LabelSchema::Original, &[1400, 1200, 6700, 700, 100], None);
    let adapted = adapt(&original).map_err(|e| e.to_string())?;
    let p = distribution(&adapted).proportions;
    for (got, want) in p.iter().zip([0.14, 0.78, 0.08]) {
        ensure!(close(*got, want, 0.01), "adapted proportions {p:?}");
    }

    let full = split_from_counts("train", LabelSchema::Adapted, &[1500, 12000, 947], None);
    let balanced = downsample(&full, 1, 1500, 6).map_err(|e| e.to_string())?;
    let d = distribution(&balanced);
    ensure!(d.counts == vec![1500, 1500, 947], "down-sampled counts {:?}", d.counts);
    for (got, want) in d.proportions.iter().zip([0.38, 0.38, 0.24]) {
        ensure!(close(*got, want, 0.01), "down-sampled proportions {:?}", d.proportions);
    }
    let again = downsample(&full, 1, 1500, 6).map_err(|e| e.to_string())?;
    ensure!(again == balanced, "same seed gave a different sample");
    let other = downsample(&full, 1, 1500, 17).map_err(|e| e.to_string())?;
    ensure!(other.ids() != balanced.ids(), "seeds 6 and 17 gave the same sample");
    ensure!(distribution(&other).counts == d.counts, "seed changed class counts");
    Ok(())
}

const MODIFIERS: [[&str; 4]; 3] = [
    ["fake", "dead", "former", "broken"],
    ["red", "tall", "old", "small"],
    ["hungry", "angry", "trained", "sharp"],
];

/// Adapted corpus where the modifier is informative about the label.
fn synthetic_corpus(name: &str, n: usize, rng: &mut ChaCha8Rng) -> DatasetSplit {
    let records = (0..n)
        .map(|i| {
            let label = match rng.random_range(0..100) {
                0..15 => 0,
                15..85 => 1,
                _ => 2,
            };
            let source = if rng.random_bool(0.8) {
                label
            } else {
                rng.random_range(0..3)
            };
            let modifier = MODIFIERS[source][rng.random_range(0..4)];
            pair(name, i, modifier, label)
        })
        .collect();
    DatasetSplit::new(name, LabelSchema::Adapted, records)
}

fn crossbal(dir: &Path, args: &[&str]) -> Result<String, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_crossbal"))
        .current_dir(dir)
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    let stdout = String::from_utf8_lossy(&out.stdout).into_owned();
    if !out.status.success() {
        return Err(format!(
            "crossbal {} exited with {}: {}",
            args.join(" "),
            out.status,
            String::from_utf8_lossy(&out.stderr)
        ));
    }
    Ok(stdout)
}

fn heatmap_sum(csv_text: &str) -> Result<f64, String> {
    let mut total = 0.0;
    for line in csv_text.lines().skip(1) {
        for cell in line.split(',').skip(1) {
            total += cell.parse::<f64>().map_err(|e| format!("heatmap cell {cell:?}: {e}"))?;
        }
    }
    Ok(total)
}

fn criterion_9() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let root = dir.path();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for (name, n) in [("train", 800), ("dev", 300)] {
        let split = synthetic_corpus(name, n, &mut rng);
        let file = std::fs::File::create(root.join(format!("{name}.jsonl"))).map_err(|e| e.to_string())?;
        write_split(&split, file).map_err(|e| e.to_string())?;
    }

    crossbal(
        root,
        &[
            "baseline",
            "--kind",
            "lexical",
            "--train",
            "train.jsonl",
            "--data",
            "dev.jsonl",
            "--seeds",
            "6,17,42",
            "--out",
            "lexical-{seed}.jsonl",
        ],
    )?;
    crossbal(
        root,
        &[
            "baseline",
            "--kind",
            "majority",
            "--train",
            "train.jsonl",
            "--data",
            "dev.jsonl",
            "--seeds",
            "6,17,42",
            "--out",
            "majority-{seed}.jsonl",
        ],
    )?;

    let mut results = Vec::new();
    for model in ["lexical", "majority"] {
        for seed in [6, 17, 42] {
            let preds = format!("{model}-{seed}.jsonl");
            let result = format!("{model}-{seed}.result.json");
            let heat = format!("{model}-{seed}.heatmap.csv");
            crossbal(
                root,
                &[
                    "evaluate",
                    "--data",
                    "dev.jsonl",
                    "--predictions",
                    &preds,
                    "--mode",
                    "both",
                    "--train-setup",
                    "full",
                    "--out",
                    &result,
                    "--heatmap-out",
                    &heat,
                ],
            )?;
            let text = std::fs::read_to_string(root.join(&heat)).map_err(|e| e.to_string())?;
            let total = heatmap_sum(&text)?;
            ensure!(close(total, 1.0, 1e-9), "{heat} sums to {total}");
            results.push(result);
        }
    }

    let mut args = vec!["compare", "--metric", "f1_macro"];
    args.extend(results.iter().map(String::as_str));
    let compared = crossbal(root, &args)?;
    ensure!(
        compared.contains("best"),
        "compare output lacks a best set:\n{compared}"
    );

    let mut args = vec!["report"];
    args.extend(results.iter().map(String::as_str));
    let report = crossbal(root, &args)?;
    let lines: Vec<&str> = report.lines().collect();
    ensure!(lines.len() >= 5, "report too short:\n{report}");
    ensure!(
        lines[0].contains("cross-balanced") && lines[0].contains("standard"),
        "report lacks regime groups:\n{report}"
    );
    ensure!(
        ["F1-macro", "ROC-AUC", "Acc"]
            .iter()
            .all(|t| lines[1].matches(t).count() == 2),
        "report lacks metric columns:\n{report}"
    );
    let row = |model: &str| {
        lines
            .iter()
            .find(|l| l.starts_with(model))
            .map(|l| l.split('|').count())
    };
    ensure!(
        row("lexical") == Some(3) && row("majority") == Some(3),
        "report rows malformed:\n{report}"
    );
    let majority = lines.iter().find(|l| l.starts_with("majority")).unwrap();
    ensure!(
        majority.contains("0.333") && majority.contains("0.167"),
        "majority cross-balanced row:\n{report}"
    );

    let mut args = vec!["report", "--heatmap", "--format", "csv"];
    args.extend(results.iter().map(String::as_str));
    crossbal(root, &args)?;
    Ok(())
}

struct Criterion {
    id: u8,
    title: &'static str,
    bound: Duration,
    run: fn() -> Check,
}

#[test]
fn primary_criteria() {
    let criteria = [
        Criterion {
            id: 1,
            title: "majority baseline, full train, standard",
            bound: Duration::from_secs(1),
            run: criterion_1,
        },
        Criterion {
            id: 2,
            title: "majority baseline, balanced train tie-break",
            bound: Duration::from_secs(1),
            run: criterion_2,
        },
        Criterion {
            id: 3,
            title: "majority baseline, cross-balanced",
            bound: Duration::from_secs(5),
            run: criterion_3,
        },
        Criterion {
            id: 4,
            title: "cross-balance coverage and uniformity",
            bound: Duration::from_secs(10),
            run: criterion_4,
        },
        Criterion {
            id: 5,
            title: "metrics oracle equivalence",
            bound: Duration::from_secs(10),
            run: criterion_5,
        },
        Criterion {
            id: 6,
            title: "threshold mapping",
            bound: Duration::from_secs(1),
            run: criterion_6,
        },
        Criterion {
            id: 7,
            title: "ASO sanity suite",
            bound: Duration::from_secs(30),
            run: criterion_7,
        },
        Criterion {
            id: 8,
            title: "dataset adaptation and down-sampling",
            bound: Duration::from_secs(5),
            run: criterion_8,
        },
        Criterion {
            id: 9,
            title: "end-to-end pipeline",
            bound: Duration::from_secs(30),
            run: criterion_9,
        },
    ];
    let mut failed = Vec::new();
    for c in &criteria {
        let start = Instant::now();
        let outcome = (c.run)();
        let elapsed = start.elapsed();
        let verdict = match &outcome {
            Ok(()) if elapsed <= c.bound => "PASS".to_string(),
            Ok(()) => format!("FAIL (over the {:?} bound)", c.bound),
            Err(e) => format!("FAIL ({e})"),
        };
        println!(
            "criterion {}: {verdict} {} [{:.3}s]",
            c.id,
            c.title,
            elapsed.as_secs_f64()
        );
        if !verdict.starts_with("PASS") {
            failed.push(c.id);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
