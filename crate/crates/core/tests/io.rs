mod common;

use std::path::Path;

use common::*;
use dtw_explain::io::{
    format_dataset, load_dataset, parse_dataset, read_relevance, write_dataset, write_relevance,
    DatasetFormat,
};
use dtw_explain::{compute_relevance, DtwConfig, Error, LabeledDataset, RelevanceConfig};
use proptest::prelude::*;

#[test]
fn relevance_csv_round_trip() {
    let (ds, q) = tiny_fixture();
    let rv = compute_relevance(&ds, &q, 1, DtwConfig::unconstrained(), RelevanceConfig::default()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rel.csv");
    write_relevance(&path, &q, &rv, false).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.lines().any(|l| l == "3,5,2.3333333333333335,1"));
    assert!(!path.with_extension("svg").exists());
    let table = read_relevance(&path).unwrap();
    assert_eq!(table.values, q.values());
    assert_eq!(table.relevance, rv.values);
    assert_eq!(table.normalized, rv.normalized);
}

#[test]
fn dataset_file_round_trip() {
    let mut r = rng(50);
    let ds = random_dataset(&mut r, 12, 3..=20, 3, false);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ds.ucr");
    write_dataset(&path, &ds).unwrap();
    let back = load_dataset(&path, &DatasetFormat::Ucr).unwrap();
    assert_eq!(back.len(), ds.len());
    for i in 0..ds.len() {
        assert_eq!(back.instance(i).values(), ds.instance(i).values());
        assert_eq!(back.label(i), ds.label(i));
    }
}

#[test]
fn whitespace_and_tab_delimited_files() {
    let p = Path::new("mem.txt");
    let tab = parse_dataset("1\t0.5\t1.5\n2\t3\t4\n", p, None).unwrap();
    let spaces = parse_dataset("  1   0.5  1.5\n2 3 4\r\n\n", p, None).unwrap();
    for ds in [tab, spaces] {
        assert_eq!(ds.len(), 2);
        assert_eq!(ds.instance(0).values(), &[0.5, 1.5]);
        assert_eq!(ds.label(1).as_str(), "2");
    }
}

#[test]
fn parse_errors_carry_positions() {
    let p = Path::new("bad.csv");
    match parse_dataset("A,1,2\nB,1,x\n", p, None) {
        Err(Error::Parse { line, column, .. }) => assert_eq!((line, column), (2, 5)),
        other => panic!("{other:?}"),
    }
    assert!(matches!(parse_dataset("\n\n", p, None), Err(Error::EmptyDataset(_))));
    assert!(matches!(parse_dataset("A,inf\nB,1\n", p, None), Err(Error::Parse { line: 1, .. })));
    let labels = vec!["A".to_string()];
    assert!(matches!(parse_dataset("1,2\n3,4\n", p, Some(&labels)), Err(Error::Parse { .. })));
}

#[test]
fn csv_needs_label_file() {
    let r = load_dataset(fixture_path("tiny.csv"), &DatasetFormat::Csv { labels: None });
    assert!(matches!(r, Err(Error::Argument(_))));
    let ds = load_dataset(
        fixture_path("tiny.csv"),
        &DatasetFormat::Csv { labels: Some(fixture_path("tiny_labels.txt")) },
    )
    .unwrap();
    assert_eq!(ds.label(1).as_str(), "B");
}

proptest! {
    #[test]
    fn float_text_round_trip(
        rows in prop::collection::vec(prop::collection::vec(-1e6f64..1e6, 1..12), 2..6)
    ) {
        let instances = rows
            .iter()
            .enumerate()
            .map(|(i, v)| labeled(v, if i % 2 == 0 { "x" } else { "y" }))
            .collect();
        let ds = LabeledDataset::new("p", instances).unwrap();
        let back = parse_dataset(&format_dataset(&ds), Path::new("p"), None).unwrap();
        for i in 0..ds.len() {
            prop_assert_eq!(back.instance(i).values(), ds.instance(i).values());
        }
    }
}
