mod common;

use common::*;
use dtw_explain::dtw::{dtw_distance, row_lower_bound, split_lower_bound, suffix_lower_bound};
use dtw_explain::knn::TablePair;
use dtw_explain::{Deletion, DtwConfig};
use rand::Rng;

/// Checks every bound against the exact modified distance for every legal
/// deletion; returns the number of (pair, deletion) checks.
fn check_pair(q: &[f64], c: &[f64], cfg: DtwConfig) -> usize {
    let n = q.len();
    let pair = TablePair::compute(q, c, 0, cfg);
    let mut checks = 0;
    for d in Deletion::enumerate(n) {
        let modified = series(q).delete_subsequence(d).unwrap();
        let exact = dp_dtw(modified.values(), c, cfg.window);
        let prefix = row_lower_bound(&pair.forward, d);
        let suffix = suffix_lower_bound(&pair.reversed, d, n);
        let split = split_lower_bound(&pair.forward, &pair.reversed, d);
        assert!(prefix <= exact, "prefix {prefix} > {exact} for {d:?}");
        assert!(suffix <= exact, "suffix {suffix} > {exact} for {d:?}");
        assert!(split <= exact, "split {split} > {exact} for {d:?}");
        if cfg.window.is_none() {
            assert!((split - exact).abs() <= 1e-9 * exact.max(1.0), "split {split} vs {exact}");
        }
        checks += 1;
    }
    checks
}

#[test]
fn bounds_never_exceed_modified_distance() {
    let mut r = rng(10);
    let mut checks = 0;
    for trial in 0..200 {
        let n: usize = r.gen_range(3..=30);
        let m = r.gen_range(1..=30);
        let (q, c) = if trial % 2 == 0 {
            (float_series(&mut r, n), float_series(&mut r, m))
        } else {
            (int_series(&mut r, n, 0, 3), int_series(&mut r, m, 0, 3))
        };
        checks += check_pair(&q, &c, DtwConfig::unconstrained());
    }
    assert!(checks > 10_000);
}

#[test]
fn bounds_hold_under_windows() {
    let mut r = rng(11);
    for _ in 0..200 {
        let n: usize = r.gen_range(3..=20);
        let m = r.gen_range(n.saturating_sub(4).max(1)..=n + 4);
        let w = r.gen_range(n.abs_diff(m)..=n.abs_diff(m) + 5);
        let q = float_series(&mut r, n);
        let c = float_series(&mut r, m);
        check_pair(&q, &c, DtwConfig::with_window(w));
    }
}

#[test]
fn prefix_bound_is_monotone_in_start() {
    let mut r = rng(12);
    let q = float_series(&mut r, 20);
    let c = float_series(&mut r, 17);
    let table = dtw_distance(&series(&q), &series(&c), DtwConfig::unconstrained(), None, true)
        .unwrap()
        .table
        .unwrap();
    let mut last = 0.0;
    for start in 2..=19 {
        let b = row_lower_bound(&table, Deletion::new(start, start).unwrap());
        assert!(b >= last);
        last = b;
    }
}
