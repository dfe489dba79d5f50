mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;

use pls_survey::data::{read_dataset, validate, LoadOptions};
use pls_survey::mediation::enumerate_indirect_paths;
use pls_survey::spec::{emit_model_spec, parse_model_spec, ModelSpec};
use pls_survey::Error;

fn bundled(name: &str) -> ModelSpec {
    let path = format!("{}/specs/{name}", env!("CARGO_MANIFEST_DIR"));
    parse_model_spec(&std::fs::read_to_string(path).unwrap()).unwrap()
}

/// Random valid spec text: a connected DAG over 2..6 constructs, an
/// optional marker block and optionally a second-order construct over the
/// first two blocks.
fn arb_spec() -> impl Strategy<Value = String> {
    (2usize..6, any::<u64>(), any::<bool>(), any::<bool>()).prop_map(|(k, bits, marker, second)| {
        let mut bits = bits;
        let mut next = |m: u64| {
            let v = bits % m;
            bits = (bits / m) ^ bits.rotate_left(17);
            v
        };
        let mut t = String::from("plsspec 1\n[constructs]\n");
        for i in 0..k {
            let n = 1 + next(4) as usize;
            let items: Vec<String> = (1..=n).map(|j| format!("c{i}_{j}")).collect();
            t.push_str(&format!("C{i} = {}\n", items.join(", ")));
        }
        if marker {
            t.push_str("MK = mk1, mk2\n");
        }
        let use_second = second && k >= 3;
        if use_second {
            t.push_str("[second_order]\nH = C0, C1\n");
        }
        let node = |i: usize| -> String {
            if use_second && i < 2 {
                "H".to_string()
            } else {
                format!("C{i}")
            }
        };
        let first = if use_second { 2 } else { 1 };
        t.push_str("[edges]\n");
        for j in first..k {
            let lo = if use_second { 1 } else { 0 };
            let forced = lo + next((j - lo) as u64) as usize;
            for i in lo..j {
                if i == forced || next(3) == 0 {
                    t.push_str(&format!("{} -> {}\n", node(i), node(j)));
                }
            }
        }
        if marker {
            t.push_str("[marker]\nMK\n");
        }
        t.push_str(&format!("[outcome]\nC{}\n", k - 1));
        t
    })
}

proptest! {
    #[test]
    fn emit_then_parse_is_identity(text in arb_spec()) {
        let spec = parse_model_spec(&text).unwrap();
        let again = parse_model_spec(&emit_model_spec(&spec)).unwrap();
        prop_assert_eq!(&spec, &again);
        prop_assert_eq!(emit_model_spec(&spec), emit_model_spec(&again));
    }

    #[test]
    fn indirect_path_count_matches_brute_force(text in arb_spec()) {
        let spec = parse_model_spec(&text).unwrap();
        let nodes = spec.structural_constructs();
        for s in &nodes {
            for t in &nodes {
                if s == t {
                    continue;
                }
                let got = enumerate_indirect_paths(&spec, s, t).unwrap();
                prop_assert_eq!(got.len(), brute_force_paths(&spec, s, t));
                let distinct: BTreeSet<_> = got.iter().collect();
                prop_assert_eq!(distinct.len(), got.len());
            }
        }
    }
}

/// Directed paths from `s` to `t` with at least one intermediate node.
fn brute_force_paths(spec: &ModelSpec, s: &str, t: &str) -> usize {
    fn walk(spec: &ModelSpec, at: &str, t: &str, depth: usize) -> usize {
        if at == t {
            return usize::from(depth >= 2);
        }
        spec.edges()
            .iter()
            .filter(|e| e.source == at)
            .map(|e| walk(spec, &e.target, t, depth + 1))
            .sum()
    }
    walk(spec, s, t, 0)
}

#[test]
fn bundled_specs_parse() {
    let s2 = bundled("study2.spec");
    assert_eq!(s2.edges().len(), 6);
    assert_eq!(s2.outcome(), "I2P");
    assert_eq!(s2.marker(), Some("MKT"));
    let paths = enumerate_indirect_paths(&s2, "SI", "I2P").unwrap();
    assert_eq!(paths.len(), 3);
    assert!(paths.contains(&vec!["SI".into(), "PSR".into(), "BE".into(), "I2P".into()]));

    let s1 = bundled("study1.spec");
    assert_eq!(s1.estimation_indicators().len(), 30);
    for name in ["psr_only.spec", "common.spec"] {
        bundled(name);
    }
}

#[test]
fn degenerate_specs_are_rejected() {
    let lone = "plsspec 1\n[constructs]\nA = a1, a2\n";
    assert!(parse_model_spec(lone).is_err());
    let cycle = common::spec_text(&[("A", 2), ("B", 2)], &[("A", "B"), ("B", "A")], Some("B"));
    assert!(matches!(parse_model_spec(&cycle), Err(Error::Cycle(_))));
}

#[test]
fn chain_and_disconnected_queries() {
    let spec = common::simple_spec(&[("A", 1), ("B", 1), ("C", 1), ("D", 1)], &[("A", "B"), ("B", "C"), ("D", "C")]);
    let p = enumerate_indirect_paths(&spec, "A", "C").unwrap();
    assert_eq!(p, vec![vec!["A".to_string(), "B".into(), "C".into()]]);
    assert!(enumerate_indirect_paths(&spec, "D", "A").unwrap().is_empty());
}

fn csv_for(names: &[&str], rows: &[Vec<f64>]) -> String {
    let mut t = names.join(",");
    t.push('\n');
    for r in rows {
        let cells: Vec<String> = r.iter().map(|v| v.to_string()).collect();
        t.push_str(&cells.join(","));
        t.push('\n');
    }
    t
}

proptest! {
    #[test]
    fn column_permutation_does_not_change_the_dataset(
        rows in prop::collection::vec(prop::collection::vec(1u8..=7, 4), 3..20),
        perm in Just([0usize, 1, 2, 3]).prop_shuffle(),
    ) {
        let spec = common::simple_spec(&[("A", 2), ("B", 2)], &[("A", "B")]);
        let names = ["a1", "a2", "b1", "b2"];
        let rows: Vec<Vec<f64>> = rows.iter().map(|r| r.iter().map(|&v| v as f64).collect()).collect();
        let base = read_dataset(csv_for(&names, &rows).as_bytes(), &spec, LoadOptions::default()).unwrap();
        let pnames: Vec<&str> = perm.iter().map(|&j| names[j]).collect();
        let prows: Vec<Vec<f64>> = rows.iter().map(|r| perm.iter().map(|&j| r[j]).collect()).collect();
        let shuffled = read_dataset(csv_for(&pnames, &prows).as_bytes(), &spec, LoadOptions::default()).unwrap();
        for n in names {
            prop_assert_eq!(base.column(n), shuffled.column(n));
        }
        let v1 = validate(&base, &spec);
        let v2 = validate(&shuffled, &spec);
        prop_assert_eq!(v1.is_ok(), v2.is_ok());
        if let (Ok(a), Ok(b)) = (v1, v2) {
            prop_assert_eq!(a.adequacy, b.adequacy);
            prop_assert_eq!(&a.warnings, &b.warnings);
        }
    }
}

#[test]
fn validation_is_repeatable() {
    let spec = common::mediation_spec(3);
    let s = common::likert(&spec, &common::MEDIATION_PATHS, 50, 4);
    let again = validate(&s.dataset, &spec).unwrap();
    assert_eq!(s, again);
    assert_eq!(s.content_hash(), again.content_hash());
    assert!((s.adequacy - 50.0 / 9.0).abs() < 1e-12);
    assert!(!s.warnings.is_empty());
}

#[test]
fn bad_cells_are_located() {
    let spec = common::simple_spec(&[("A", 2), ("B", 2)], &[("A", "B")]);
    let text = "a1,a2,b1,b2\n1,2,3,4\n2,eight,3,4\n";
    match read_dataset(text.as_bytes(), &spec, LoadOptions::default()) {
        Err(Error::NonNumeric { row, column, .. }) => {
            assert_eq!(column, "a2");
            assert_eq!(row, 2);
        }
        other => panic!("{other:?}"),
    }
    let text = "a1,a2,b1,b2\n1,2,3,4\n2,9,3,4\n";
    assert!(matches!(
        read_dataset(text.as_bytes(), &spec, LoadOptions::default()),
        Err(Error::OutOfRange { .. })
    ));
    let text = "a1,a2,b1,b2\n4,2,3,4\n4,3,1,5\n4,1,2,2\n";
    let ds = read_dataset(text.as_bytes(), &spec, LoadOptions::default()).unwrap();
    let err = validate(&ds, &spec).unwrap_err();
    assert!(err.to_string().contains("a1"), "{err}");
}
