mod common;

use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pls_survey::bootstrap::Significance;
use pls_survey::classify::c45::{self, C45Config};
use pls_survey::classify::{
    binarize_by_decile, run_classifier, select_threshold, BinaryTask, ClassifierKind, ClassifierSettings, ROSTER,
};
use pls_survey::mediation::{
    change_rate, classify_mediation, compare_models, percentage_difference, CompareMode, EffectDecomposition,
    EffectKind, EffectPlan, MediationType, ModelSummary,
};

fn path(nodes: &[&str]) -> Vec<String> {
    nodes.iter().map(|s| s.to_string()).collect()
}

fn arb_dag() -> impl Strategy<Value = (usize, Vec<(usize, usize)>, Vec<f64>)> {
    (3usize..7).prop_flat_map(|k| {
        let pairs: Vec<(usize, usize)> = (1..k).flat_map(|j| (0..j).map(move |i| (i, j))).collect();
        let m = pairs.len();
        (
            Just(k),
            prop::collection::vec(any::<bool>(), m),
            prop::collection::vec(-1.0f64..1.0, m),
        )
            .prop_map(move |(k, keep, coef)| {
                // every construct after the first keeps its edge from the
                // previous one, so the graph is connected
                let edges: Vec<(usize, usize)> = pairs
                    .iter()
                    .zip(&keep)
                    .filter(|(&(i, j), &b)| b || i + 1 == j)
                    .map(|(&e, _)| e)
                    .collect();
                (k, edges, coef)
            })
    })
}

proptest! {
    #[test]
    fn total_effect_is_direct_plus_indirect((k, edges, coef) in arb_dag()) {
        let names: Vec<String> = (0..k).map(|i| format!("C{i}")).collect();
        let sized: Vec<(&str, usize)> = names.iter().map(|n| (n.as_str(), 1)).collect();
        let named: Vec<(&str, &str)> = edges.iter().map(|&(i, j)| (names[i].as_str(), names[j].as_str())).collect();
        let text = common::spec_text(&sized, &named, Some(&names[k - 1]));
        let spec = pls_survey::spec::parse_model_spec(&text).unwrap();
        let idx = |n: &str| n[1..].parse::<usize>().unwrap();
        let mut b = DMatrix::zeros(k, k);
        for (e, &(i, j)) in edges.iter().enumerate() {
            b[(i, j)] = coef[e];
        }
        let plan = EffectPlan::new(&spec);
        let vals = plan.evaluate(|s, t| Some(b[(idx(s), idx(t))]));
        let reduced = (DMatrix::identity(k, k) - &b).try_inverse().unwrap();
        for (pos, id) in plan.ids.iter().enumerate() {
            let same = |o: &&pls_survey::mediation::EffectId| o.source() == id.source() && o.target() == id.target();
            let sum = |kinds: &[EffectKind]| -> f64 {
                plan.ids.iter().zip(&vals).filter(|(o, _)| same(o) && kinds.contains(&o.kind)).map(|(_, v)| v).sum()
            };
            match id.kind {
                EffectKind::Total => {
                    prop_assert!((vals[pos] - sum(&[EffectKind::Direct, EffectKind::SpecificIndirect])).abs() < 1e-10);
                    prop_assert!((vals[pos] - reduced[(idx(id.source()), idx(id.target()))]).abs() < 1e-10);
                }
                EffectKind::TotalIndirect => {
                    prop_assert!((vals[pos] - sum(&[EffectKind::SpecificIndirect])).abs() < 1e-10);
                }
                _ => {}
            }
        }
    }

    #[test]
    fn percentage_difference_is_symmetric_and_change_rate_is_not(a in 0.1f64..100.0, b in 0.1f64..100.0) {
        prop_assert_eq!(percentage_difference(a, b).unwrap(), percentage_difference(b, a).unwrap());
        if (a - b).abs() > 1e-6 {
            prop_assert!((change_rate(a, b).unwrap() - change_rate(b, a).unwrap()).abs() > 1e-9);
        }
        prop_assert_eq!(percentage_difference(a, a).unwrap(), 0.0);
        prop_assert_eq!(change_rate(a, a).unwrap(), 0.0);
    }

    #[test]
    fn mediation_class_ignores_positive_rescaling(
        de in -1.0f64..1.0,
        ie in prop::collection::vec(-1.0f64..1.0, 1..4),
        p in prop::collection::vec(0.0f64..0.2, 3),
        c in 0.01f64..100.0,
        has_direct in any::<bool>(),
    ) {
        let build = |scale: f64| {
            let specific = ie
                .iter()
                .enumerate()
                .map(|(i, v)| (path(&["A", &format!("M{i}"), "B"]), v * scale))
                .collect();
            let mut d = EffectDecomposition::from_components("A", "B", has_direct.then_some(de * scale), specific);
            d.direct_significance = Some(Significance::from_p(Some(p[0])));
            d.total_indirect_significance = Some(Significance::from_p(Some(p[1])));
            d.total_significance = Some(Significance::from_p(Some(p[2])));
            d
        };
        prop_assert_eq!(classify_mediation(&build(1.0), 0.05).unwrap(), classify_mediation(&build(c), 0.05).unwrap());
    }
}

fn decomposition(de: f64, de_p: f64, ie: &[f64], ie_p: f64) -> EffectDecomposition {
    let specific = ie
        .iter()
        .enumerate()
        .map(|(i, v)| (path(&["A", &format!("M{i}"), "B"]), *v))
        .collect();
    let mut d = EffectDecomposition::from_components("A", "B", Some(de), specific);
    d.direct_significance = Some(Significance::from_p(Some(de_p)));
    d.total_indirect_significance = Some(Significance::from_p(Some(ie_p)));
    d.total_significance = Some(Significance::from_p(Some(0.0)));
    d
}

#[test]
fn mediation_decision_tree() {
    let c = classify_mediation(&decomposition(0.15, 0.001, &[0.173, 0.046], 0.0), 0.05).unwrap();
    assert_eq!(c.kind, MediationType::Complementary);
    assert_eq!(c.label, "complementary (partial), positive");
    let c = classify_mediation(&decomposition(0.05, 0.510, &[0.3], 0.0), 0.05).unwrap();
    assert_eq!(c.kind, MediationType::IndirectOnly);
    assert_eq!(c.label, "indirect-only (full)");
    let c = classify_mediation(&decomposition(0.05, 0.5, &[0.01], 0.4), 0.05).unwrap();
    assert_eq!(c.kind, MediationType::NoEffect);
    let c = classify_mediation(&decomposition(-0.3, 0.01, &[0.3], 0.01), 0.05).unwrap();
    assert_eq!(c.kind, MediationType::Competitive);
    assert!(Significance::from_p(Some(0.047)).is_significant(0.05));
}

#[test]
fn absent_edge_keeps_only_the_indirect_effect() {
    let d = EffectDecomposition::from_components("A", "C", None, vec![(path(&["A", "B", "C"]), 0.3)]);
    assert_eq!(d.direct, 0.0);
    assert!((d.total - 0.3).abs() < 1e-15);
}

fn summary(label: &str, share: f64) -> ModelSummary {
    let mut s = ModelSummary {
        label: label.into(),
        ..Default::default()
    };
    for (k, v) in [("total_variance_pct", 47.578), ("aic", -120.5), ("srmr", 0.073), ("nfi", 0.92)] {
        s.metrics.insert(k.into(), v);
    }
    s.shares.insert("SI -> I2P (total indirect)".into(), share);
    s
}

#[test]
fn comparisons_pair_metrics_and_flag_share_shifts() {
    let a = summary("sequential", 59.35);
    let b = summary("single mediator", 43.92);
    let r = compare_models(&a, &b, CompareMode::Within, 5.0).unwrap();
    assert_eq!(r.shares.len(), 1);
    assert!((r.shares[0].delta_points - 15.43).abs() < 1e-9);
    assert!(r.shares[0].flagged);

    let same = compare_models(&a, &a, CompareMode::Between, 5.0).unwrap();
    assert!(same.metrics.iter().all(|m| m.delta_pct == Some(0.0)));
    assert!(same.shares.iter().all(|s| s.delta_points == 0.0 && !s.flagged));
    assert!(same.unmatched.is_empty());

    assert!((percentage_difference(0.92, 0.85).unwrap() - 7.91).abs() < 0.005);
    let mut missing = summary("partial", 1.0);
    missing.metrics.remove("nfi");
    assert!(compare_models(&a, &missing, CompareMode::Within, 5.0).is_err());
}

#[test]
fn decile_thresholds_follow_the_sorted_quantile() {
    let scores: Vec<f64> = (1..=10).map(f64::from).collect();
    let (t, labels) = binarize_by_decile(&scores, 5).unwrap();
    assert!((t - 5.5).abs() < 1e-12);
    assert_eq!(labels, (0..10).map(|i| i >= 5).collect::<Vec<_>>());
    // quantile oracle: position (n - 1) p between neighbours
    let (t, labels) = binarize_by_decile(&scores, 9).unwrap();
    let pos = 9.0 * 0.9;
    let oracle = scores[8] + (pos - 8.0) * (scores[9] - scores[8]);
    assert!((t - oracle).abs() < 1e-12);
    assert!((t - 9.1).abs() < 1e-12);
    assert_eq!(labels.iter().filter(|&&b| b).count(), 1);
    assert!(binarize_by_decile(&[3.0; 8], 5).is_err());
}

fn settings() -> ClassifierSettings {
    ClassifierSettings::default()
}

#[test]
fn pooled_accuracy_is_the_weighted_fold_mean() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let n = 157;
    let x = DMatrix::from_fn(n, 2, |_, _| rng.random_range(-2.0..2.0));
    let y: Vec<bool> = (0..n).map(|i| x[(i, 0)] + 0.8 * rng.random_range(-1.0..1.0) > 0.0).collect();
    let task = BinaryTask::from_labels(vec!["a".into(), "b".into()], x, y).unwrap();
    for kind in ROSTER {
        let r = run_classifier(kind, &task, 10, 7, &settings()).unwrap();
        let total: usize = r.fold_counts.iter().map(|c| c.total()).sum();
        assert_eq!(total, n);
        let weighted: f64 = r
            .fold_counts
            .iter()
            .map(|c| (c.tp + c.tn) as f64 / c.total() as f64 * c.total() as f64)
            .sum::<f64>()
            / n as f64;
        assert!((weighted - r.metrics.accuracy).abs() < 1e-12);
        assert_eq!(r, run_classifier(kind, &task, 10, 7, &settings()).unwrap());
    }
}

fn shuffled_accuracy(n: usize, share: f64, seed: u64) -> Vec<f64> {
    let trials = 10;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut acc = vec![0.0; ROSTER.len()];
    for t in 0..trials {
        let x = DMatrix::from_fn(n, 3, |_, _| rng.random_range(-1.0..1.0));
        let mut y: Vec<bool> = (0..n).map(|i| (i as f64) < share * n as f64).collect();
        y.shuffle(&mut rng);
        let task = BinaryTask::from_labels(vec!["a".into(), "b".into(), "c".into()], x, y).unwrap();
        for (k, kind) in ROSTER.iter().enumerate() {
            acc[k] += run_classifier(*kind, &task, 10, t, &settings()).unwrap().metrics.accuracy / trials as f64;
        }
    }
    acc
}

#[test]
fn shuffled_labels_stay_near_the_majority_rate() {
    for (kind, a) in ROSTER.iter().zip(shuffled_accuracy(200, 0.5, 11)) {
        assert!((a - 0.5).abs() <= 0.07, "{kind}: {a:.3}");
    }
}

#[test]
fn shuffled_imbalanced_labels_never_beat_the_majority_rate() {
    // a learner that fits noise guesses with the label marginals, which
    // scores p^2 + (1 - p)^2 rather than p; only the upper side detects leakage
    let p = 0.6;
    let chance = p * p + (1.0 - p) * (1.0 - p);
    for (kind, a) in ROSTER.iter().zip(shuffled_accuracy(200, p, 11)) {
        assert!(a <= p + 0.07, "{kind}: {a:.3}");
        assert!(a >= chance - 0.07, "{kind}: {a:.3}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn unpruned_tree_fits_consistent_data(rows in prop::collection::btree_map((0u8..6, 0u8..6, 0u8..4), any::<bool>(), 2..60)) {
        let keys: Vec<_> = rows.keys().copied().collect();
        let x = DMatrix::from_fn(keys.len(), 3, |i, j| match j {
            0 => keys[i].0 as f64,
            1 => keys[i].1 as f64,
            _ => keys[i].2 as f64,
        });
        let y: Vec<bool> = rows.values().copied().collect();
        let tree = c45::fit(&x, &y, &C45Config { min_leaf: 1, confidence: None });
        for i in 0..keys.len() {
            prop_assert_eq!(tree.predict(&[x[(i, 0)], x[(i, 1)], x[(i, 2)]]), y[i]);
        }
    }
}

#[test]
fn separable_outcome_selects_the_middle_decile() {
    // ten well separated groups of 12, so every decile cut falls in a gap
    let n = 120;
    let outcome: Vec<f64> = (0..n).map(|i| (i / 12) as f64).collect();
    let features = DMatrix::from_fn(n, 1, |i, _| outcome[i] * 3.0 - 1.0);
    let kinds = [ClassifierKind::OneR, ClassifierKind::C45, ClassifierKind::Logistic];
    let r = select_threshold("A -> B", &outcome, &["A".to_string()], &features, &kinds, 10, 0, &settings()).unwrap();
    assert_eq!(r.decile, 5);
    assert_eq!(r.best_result().metrics.accuracy, 1.0);
}

#[test]
fn monotone_outcome_matches_the_best_single_split() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let n = 150;
    let f: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..1.0)).collect();
    let outcome: Vec<f64> = f.iter().map(|v| v + 0.15 * rng.random_range(-1.0..1.0)).collect();
    let features = DMatrix::from_fn(n, 1, |i, _| f[i]);
    let r = select_threshold(
        "A -> B",
        &outcome,
        &["A".to_string()],
        &features,
        &[ClassifierKind::C45],
        10,
        0,
        &settings(),
    )
    .unwrap();
    // a single threshold on the feature cannot beat the best split of the
    // selected task's labels
    let (_, labels) = binarize_by_decile(&outcome, r.decile).unwrap();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| f[a].total_cmp(&f[b]));
    let mut best = 0;
    for cut in 0..=n {
        let above = |i: usize| order.iter().position(|&o| o == i).unwrap() >= cut;
        for flip in [false, true] {
            let ok = (0..n).filter(|&i| (above(i) ^ flip) == labels[i]).count();
            best = best.max(ok);
        }
    }
    assert!(r.best_result().metrics.accuracy <= best as f64 / n as f64 + 1e-12);
    assert!(r.best_result().metrics.accuracy >= best as f64 / n as f64 - 0.1);
}

#[test]
fn noise_outcome_selects_nothing_better_than_the_majority() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let n = 300;
    let outcome: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..1.0)).collect();
    let features = DMatrix::from_fn(n, 2, |_, _| rng.random_range(0.0..1.0));
    let names = ["A".to_string(), "B".to_string()];
    let r = select_threshold("A, B -> C", &outcome, &names, &features, &ROSTER, 10, 0, &settings()).unwrap();
    let (_, labels) = binarize_by_decile(&outcome, r.decile).unwrap();
    let pos = labels.iter().filter(|&&b| b).count() as f64 / n as f64;
    let majority = pos.max(1.0 - pos);
    let acc = r.best_result().metrics.accuracy;
    assert!((acc - majority).abs() <= 0.05, "{acc} vs {majority}");
}
