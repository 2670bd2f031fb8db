mod common;

use common::*;
use dtw_explain::{find_min_deletion, search_with_reuse, DtwConfig, Optimizations, Outcome, SearchResult};
use rand::Rng;

fn as_tuple(r: &SearchResult) -> Option<(usize, usize, String)> {
    match &r.outcome {
        Outcome::Flip { deletion, flipped, .. } => {
            Some((deletion.start(), deletion.len(), flipped.as_str().to_string()))
        }
        Outcome::NoFlip { .. } => None,
    }
}

fn variants() -> Vec<(&'static str, Optimizations)> {
    vec![
        ("naive", Optimizations::naive()),
        ("abandon", Optimizations::abandon_only()),
        ("bounds", Optimizations::abandon_and_bounds()),
        ("reuse", Optimizations::default()),
        ("split", Optimizations::default().with_split_bound()),
        ("triangle", Optimizations::default().with_unsound_triangle()),
        ("degraded", Optimizations::default().with_cache_budget(0)),
    ]
}

#[test]
fn worked_example_flips_the_spike() {
    let (ds, q) = tiny_fixture();
    for (name, opts) in variants() {
        let r = find_min_deletion(&ds, &q, 1, DtwConfig::unconstrained(), opts).unwrap();
        assert_eq!(r.outcome.to_string(), "FLIP start=3 length=1 from=B to=A", "{name}");
    }
}

#[test]
fn every_variant_matches_the_naive_oracle() {
    let mut r = rng(30);
    for trial in 0..200 {
        let size = r.gen_range(2..=15);
        let integer = trial % 2 == 0;
        let ds = random_dataset(&mut r, size, 4..=12, 2 + trial % 2, integer);
        let n = r.gen_range(3..=12);
        let q = if integer { int_series(&mut r, n, 0, 4) } else { float_series(&mut r, n) };
        let k = if trial % 4 == 3 { 3.min(size) } else { 1 };
        let expected = naive_min_deletion(&ds, &q, k, None);
        let mut digests = Vec::new();
        for (name, opts) in variants() {
            let res = find_min_deletion(&ds, &series(&q), k, DtwConfig::unconstrained(), opts).unwrap();
            assert_eq!(as_tuple(&res), expected, "trial {trial} variant {name}");
            assert!(res.stats.verification_failures <= res.stats.deletions_evaluated);
            digests.push(res.digest());
        }
        assert!(digests.windows(2).all(|w| w[0] == w[1]));
    }
}

#[test]
fn windowed_search_matches_oracle() {
    let mut r = rng(31);
    for _ in 0..60 {
        let size = r.gen_range(2..=8);
        let ds = random_dataset(&mut r, size, 8..=10, 2, true);
        let q = int_series(&mut r, 10, 0, 4);
        let w = r.gen_range(2..=5);
        let expected = naive_min_deletion(&ds, &q, 1, Some(w));
        for (name, opts) in variants() {
            let res = find_min_deletion(&ds, &series(&q), 1, DtwConfig::with_window(w), opts).unwrap();
            assert_eq!(as_tuple(&res), expected, "variant {name} window {w}");
        }
    }
}

#[test]
fn reuse_does_less_work_than_naive() {
    let mut r = rng(32);
    let ds = random_dataset(&mut r, 40, 20..=20, 2, false);
    let q = series(&float_series(&mut r, 20));
    let naive = find_min_deletion(&ds, &q, 1, DtwConfig::unconstrained(), Optimizations::naive()).unwrap();
    let fast = search_with_reuse(&ds, &q, 1, DtwConfig::unconstrained()).unwrap();
    assert_eq!(naive.outcome, fast.outcome);
    assert!(fast.stats.counters.rows_computed < naive.stats.counters.rows_computed);
    assert!(fast.stats.counters.resumed_rows > 0);
}

#[test]
fn degraded_cache_is_reported() {
    let (ds, q) = tiny_fixture();
    let r = find_min_deletion(&ds, &q, 1, DtwConfig::unconstrained(), Optimizations::default().with_cache_budget(0))
        .unwrap();
    assert!(r.stats.cache_degraded);
    assert_eq!(r.outcome.to_string(), "FLIP start=3 length=1 from=B to=A");
}

#[test]
fn no_flip_when_nothing_changes_the_class() {
    let ds = dtw_explain::LabeledDataset::new(
        "far",
        vec![labeled(&[1., 1., 1.], "A"), labeled(&[5., 5., 5.], "B")],
    )
    .unwrap();
    let r = search_with_reuse(&ds, &series(&[1., 1., 1.]), 1, DtwConfig::unconstrained()).unwrap();
    assert_eq!(r.outcome.to_string(), "NOFLIP");
    assert_eq!(r.deletion(), None);
}

#[test]
fn short_query_is_rejected() {
    let (ds, _) = tiny_fixture();
    assert!(search_with_reuse(&ds, &series(&[0., 5.]), 1, DtwConfig::unconstrained()).is_err());
}
