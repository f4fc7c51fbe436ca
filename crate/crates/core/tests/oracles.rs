//! Implementation vs. independent brute-force oracles.

use crossbal::dataset::{
    adapt, distribution, downsample, parse_split, write_split, DatasetSplit, FieldMapping, LabelSchema, SentencePair,
};
use crossbal::metrics::{accuracy, confusion, f1_macro, per_class, roc_auc_ovr_macro};
use crossbal::significance::{compare_all, violation_ratio, AsoConfig, Integration, ScoreSample};
use proptest::prelude::*;

/// Per-definition recount straight from the label lists.
fn oracle_prf(gold: &[usize], pred: &[usize], k: usize) -> (f64, Vec<(f64, f64, f64)>, f64) {
    let n = gold.len();
    let correct = gold.iter().zip(pred).filter(|(g, p)| g == p).count();
    let acc = correct as f64 / n as f64;
    let mut scores = Vec::new();
    for c in 0..k {
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
        scores.push((p, r, f));
    }
    let macro_f1 = scores.iter().map(|s| s.2).sum::<f64>() / k as f64;
    (acc, scores, macro_f1)
}

/// O(n^2) pairwise AUC, ties worth 1/2, macro over present classes.
fn oracle_auc(gold: &[usize], probs: &[Vec<f64>]) -> f64 {
    let k = probs[0].len();
    let mut total = 0.0;
    let mut present = 0;
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
                if x > y {
                    wins += 1.0;
                } else if x == y {
                    wins += 0.5;
                }
            }
        }
        total += wins / (pos.len() as f64 * neg.len() as f64);
        present += 1;
    }
    total / present as f64
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Midpoint rule on a grid fine enough that every cell sits inside one step
/// of both empirical quantile functions, evaluating the quantiles by their
/// definition `inf { x : F(x) >= t }`.
fn oracle_violation_ratio(a: &[f64], b: &[f64]) -> f64 {
    let lcm = a.len() / gcd(a.len(), b.len()) * b.len();
    let cells = lcm * 4;
    let q = |xs: &[f64], t: f64| -> f64 {
        let mut s = xs.to_vec();
        s.sort_by(f64::total_cmp);
        *s.iter()
            .find(|&&x| xs.iter().filter(|&&y| y <= x).count() as f64 / xs.len() as f64 >= t)
            .unwrap()
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

fn labels_and_preds() -> impl Strategy<Value = (usize, Vec<usize>, Vec<usize>)> {
    prop_oneof![Just(2usize), Just(3usize), Just(5usize)].prop_flat_map(|k| {
        (1usize..=50).prop_flat_map(move |n| (Just(k), prop::collection::vec(0..k, n), prop::collection::vec(0..k, n)))
    })
}

fn prob_instances() -> impl Strategy<Value = (Vec<usize>, Vec<Vec<f64>>)> {
    (2usize..=50, 2usize..=4).prop_flat_map(|(n, k)| {
        // coarse grid of values makes ties common
        (
            prop::collection::vec(0..k, n),
            prop::collection::vec(prop::collection::vec(0u8..6, k), n),
        )
            .prop_filter("two gold classes", |(g, _)| g.iter().any(|&x| x != g[0]))
            .prop_map(|(gold, raw)| {
                let probs = raw
                    .into_iter()
                    .map(|r| {
                        let t: f64 = r.iter().map(|&v| v as f64 + 1.0).sum();
                        r.iter().map(|&v| (v as f64 + 1.0) / t).collect()
                    })
                    .collect();
                (gold, probs)
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn metrics_match_oracle((k, gold, pred) in labels_and_preds()) {
        let cm = confusion(&gold, &pred, k).unwrap();
        let (acc, scores, macro_f1) = oracle_prf(&gold, &pred, k);
        prop_assert_eq!(accuracy(&cm).unwrap(), acc);
        prop_assert_eq!(f1_macro(&cm).unwrap(), macro_f1);
        for (s, o) in per_class(&cm).iter().zip(&scores) {
            prop_assert_eq!((s.precision, s.recall, s.f1), *o);
        }
    }

    #[test]
    fn auc_matches_pairwise((gold, probs) in prob_instances()) {
        prop_assert_eq!(roc_auc_ovr_macro(&gold, &probs).unwrap(), oracle_auc(&gold, &probs));
    }

    #[test]
    fn metrics_permutation_invariant((k, gold, pred) in labels_and_preds(), rot in 0usize..50) {
        let n = gold.len();
        let r = rot % n;
        let g2: Vec<usize> = gold[r..].iter().chain(&gold[..r]).copied().collect();
        let p2: Vec<usize> = pred[r..].iter().chain(&pred[..r]).copied().collect();
        let a = confusion(&gold, &pred, k).unwrap();
        let b = confusion(&g2, &p2, k).unwrap();
        prop_assert_eq!(f1_macro(&a).unwrap(), f1_macro(&b).unwrap());
        prop_assert_eq!(accuracy(&a).unwrap(), accuracy(&b).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn violation_ratio_matches_integration_oracle(
        a in prop::collection::vec(-1.0f64..1.0, 2..6),
        b in prop::collection::vec(-1.0f64..1.0, 2..6),
    ) {
        let got = violation_ratio(&a, &b, Integration::Exact);
        prop_assert!((got - oracle_violation_ratio(&a, &b)).abs() < 1e-6);
    }

    #[test]
    fn violation_ratio_scale_invariant(
        a in prop::collection::vec(0.0f64..1.0, 2..6),
        b in prop::collection::vec(0.0f64..1.0, 2..6),
        c in 0.01f64..100.0,
    ) {
        let ca: Vec<f64> = a.iter().map(|x| x * c).collect();
        let cb: Vec<f64> = b.iter().map(|x| x * c).collect();
        let e1 = violation_ratio(&a, &b, Integration::Exact);
        let e2 = violation_ratio(&ca, &cb, Integration::Exact);
        prop_assert!((e1 - e2).abs() < 1e-12);
    }

    #[test]
    fn upward_shift_never_increases_violation(
        a in prop::collection::vec(0.0f64..1.0, 2..6),
        b in prop::collection::vec(0.0f64..1.0, 2..6),
        shift in 0.0f64..0.5,
    ) {
        let shifted: Vec<f64> = a.iter().map(|x| x + shift).collect();
        let before = violation_ratio(&a, &b, Integration::Exact);
        let after = violation_ratio(&shifted, &b, Integration::Exact);
        prop_assert!(after <= before + 1e-12);
    }
}

#[test]
fn compare_all_is_thread_count_independent() {
    let samples: Vec<ScoreSample> = (0..4)
        .map(|i| {
            let base = 0.5 + 0.01 * i as f64;
            ScoreSample::new(format!("m{i}"), "f1_macro", vec![base, base + 0.02, base - 0.015])
        })
        .collect();
    let cfg = AsoConfig::default();
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| compare_all(&samples, &cfg).unwrap())
    };
    let one = run(1);
    let four = run(4);
    for (r1, r4) in one.eps_min.iter().zip(&four.eps_min) {
        for (x, y) in r1.iter().zip(r4) {
            assert_eq!(x.to_bits(), y.to_bits());
        }
    }
    assert_eq!(one, compare_all(&samples, &cfg).unwrap());
}

fn corpus(labels: &[usize], schema: LabelSchema) -> DatasetSplit {
    DatasetSplit::new(
        "train",
        schema,
        labels
            .iter()
            .enumerate()
            .map(|(i, &label)| SentencePair {
                id: format!("train-{i}"),
                sentence1: format!("the \"event\" {i} happens"),
                sentence2: format!("the odd \"event\" {i} happens"),
                modifier: ["odd", "dead", "false"][i % 3].into(),
                label,
            })
            .collect(),
    )
}

proptest! {
    #[test]
    fn dataset_round_trips(labels in prop::collection::vec(0usize..5, 0..40)) {
        let split = corpus(&labels, LabelSchema::Original);
        let mut buf = Vec::new();
        write_split(&split, &mut buf).unwrap();
        let back = parse_split(buf.as_slice(), "train", LabelSchema::Original, &FieldMapping::identity()).unwrap();
        prop_assert_eq!(&back, &split);

        let adapted = adapt(&split).unwrap();
        let mut buf = Vec::new();
        write_split(&adapted, &mut buf).unwrap();
        let back = parse_split(buf.as_slice(), "train", LabelSchema::Adapted, &FieldMapping::identity()).unwrap();
        prop_assert_eq!(back, adapted);
    }

    #[test]
    fn adapt_matches_filtering(labels in prop::collection::vec(0usize..5, 0..60)) {
        let split = corpus(&labels, LabelSchema::Original);
        let adapted = adapt(&split).unwrap();
        let mut got: Vec<(String, String, usize)> =
            adapted.records.iter().map(|r| (r.sentence1.clone(), r.sentence2.clone(), r.label)).collect();
        let mut expected: Vec<(String, String, usize)> = split
            .records
            .iter()
            .filter(|r| r.label != 0 && r.label != 4)
            .map(|r| (r.sentence1.clone(), r.sentence2.clone(), r.label - 1))
            .collect();
        got.sort();
        expected.sort();
        prop_assert_eq!(got, expected);
    }

    #[test]
    fn downsample_is_order_preserving_subsequence(
        labels in prop::collection::vec(0usize..3, 1..80),
        seed in any::<u64>(),
        frac in 0.0f64..=1.0,
    ) {
        let split = corpus(&labels, LabelSchema::Adapted);
        let before = distribution(&split).counts;
        let target = (before[1] as f64 * frac).floor() as usize;
        let out = downsample(&split, 1, target, seed).unwrap();
        let after = distribution(&out).counts;
        prop_assert_eq!(after[0], before[0]);
        prop_assert_eq!(after[2], before[2]);
        prop_assert_eq!(after[1], target);
        let positions: Vec<usize> = out
            .records
            .iter()
            .map(|r| split.records.iter().position(|s| s.id == r.id).unwrap())
            .collect();
        prop_assert!(positions.windows(2).all(|w| w[0] < w[1]));
        prop_assert_eq!(out, downsample(&split, 1, target, seed).unwrap());
    }
}
