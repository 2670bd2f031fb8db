//! Reference implementations used as oracles by the integration tests.
//! Everything here is deliberately simple and independent of the library's
//! own evaluation paths.

#![allow(dead_code)]

use std::collections::BTreeMap;

use dtw_explain::{ClassLabel, LabeledDataset, TimeSeries};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Minimum over every monotone, continuous warping path from `(1, 1)` to
/// `(n, m)`, optionally restricted to `|i - j| <= w`.
pub fn brute_dtw(s: &[f64], t: &[f64], window: Option<usize>) -> f64 {
    fn walk(s: &[f64], t: &[f64], w: Option<usize>, i: usize, j: usize, acc: f64, best: &mut f64) {
        if let Some(w) = w {
            if i.abs_diff(j) > w {
                return;
            }
        }
        let acc = acc + (s[i] - t[j]).abs();
        if i + 1 == s.len() && j + 1 == t.len() {
            if acc < *best {
                *best = acc;
            }
            return;
        }
        if i + 1 < s.len() {
            walk(s, t, w, i + 1, j, acc, best);
        }
        if j + 1 < t.len() {
            walk(s, t, w, i, j + 1, acc, best);
        }
        if i + 1 < s.len() && j + 1 < t.len() {
            walk(s, t, w, i + 1, j + 1, acc, best);
        }
    }
    let mut best = f64::INFINITY;
    walk(s, t, window, 0, 0, 0.0, &mut best);
    best
}

/// Plain quadratic DTW with no abandoning, bounds or reuse.
pub fn dp_dtw(s: &[f64], t: &[f64], window: Option<usize>) -> f64 {
    let (n, m) = (s.len(), t.len());
    let mut d = vec![vec![f64::INFINITY; m + 1]; n + 1];
    d[0][0] = 0.0;
    for i in 1..=n {
        for j in 1..=m {
            if window.is_some_and(|w| i.abs_diff(j) > w) {
                continue;
            }
            let best = d[i - 1][j - 1].min(d[i - 1][j]).min(d[i][j - 1]);
            d[i][j] = (s[i - 1] - t[j - 1]).abs() + best;
        }
    }
    d[n][m]
}

/// Linear-scan k-NN: all distances, sorted by (distance, index), infinite
/// distances dropped. Returns (0-based index, distance) pairs.
pub fn scan_knn(dataset: &LabeledDataset, query: &[f64], k: usize, window: Option<usize>) -> Vec<(usize, f64)> {
    let mut all: Vec<(usize, f64)> = dataset
        .instances()
        .iter()
        .enumerate()
        .map(|(i, s)| (i, dp_dtw(query, s.values(), window)))
        .filter(|(_, d)| d.is_finite())
        .collect();
    all.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
    all.truncate(k);
    all
}

/// Majority vote; ties go to the smaller summed distance, then to the
/// lexicographically smaller label.
pub fn scan_vote(dataset: &LabeledDataset, neighbors: &[(usize, f64)]) -> Option<String> {
    let mut tally: BTreeMap<String, (usize, f64)> = BTreeMap::new();
    for &(i, d) in neighbors {
        let e = tally.entry(dataset.label(i).as_str().to_string()).or_insert((0, 0.0));
        e.0 += 1;
        e.1 += d;
    }
    let mut best: Option<(String, usize, f64)> = None;
    for (label, (count, sum)) in tally {
        let better = match &best {
            None => true,
            Some((_, c, s)) => count > *c || (count == *c && sum < *s),
        };
        if better {
            best = Some((label, count, sum));
        }
    }
    best.map(|(l, _, _)| l)
}

pub fn scan_classify(dataset: &LabeledDataset, query: &[f64], k: usize, window: Option<usize>) -> Option<String> {
    scan_vote(dataset, &scan_knn(dataset, query, k, window))
}

fn delete(q: &[f64], start: usize, len: usize) -> Vec<f64> {
    let mut v = q[..start - 1].to_vec();
    v.extend_from_slice(&q[start - 1 + len..]);
    v
}

/// Shortest, then leftmost, deletion `(start, length)` that changes the
/// scan classification, with the flipped label.
pub fn naive_min_deletion(
    dataset: &LabeledDataset,
    query: &[f64],
    k: usize,
    window: Option<usize>,
) -> Option<(usize, usize, String)> {
    let n = query.len();
    let original = scan_classify(dataset, query, k, window)?;
    for len in 1..=n - 2 {
        for start in 2..=n - len {
            let label = scan_classify(dataset, &delete(query, start, len), k, window);
            if let Some(l) = label {
                if l != original {
                    return Some((start, len, l));
                }
            }
        }
    }
    None
}

/// Relevance by direct enumeration of the permitted deletions.
pub fn brute_relevance(
    dataset: &LabeledDataset,
    query: &[f64],
    k: usize,
    window: Option<usize>,
    stride: usize,
    max_len: Option<usize>,
) -> Vec<f64> {
    let n = query.len();
    let original = scan_classify(dataset, query, k, window);
    let cap = max_len.unwrap_or(n - 2);
    let mut r = vec![0.0; n];
    for len in 1..=cap {
        let mut start = 2;
        while start <= n - len {
            let label = scan_classify(dataset, &delete(query, start, len), k, window);
            if label.is_some() && label != original {
                for v in &mut r[start - 1..start - 1 + len] {
                    *v += 1.0 / len as f64;
                }
            }
            start += stride;
        }
    }
    r
}

pub fn int_series(rng: &mut ChaCha8Rng, len: usize, lo: i32, hi: i32) -> Vec<f64> {
    (0..len).map(|_| rng.gen_range(lo..=hi) as f64).collect()
}

pub fn float_series(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    (0..len).map(|_| rng.gen_range(-10.0..10.0)).collect()
}

/// Random labelled dataset with `size` instances whose lengths are drawn
/// from `lens`, over `classes` labels (at least two present).
pub fn random_dataset(
    rng: &mut ChaCha8Rng,
    size: usize,
    lens: std::ops::RangeInclusive<usize>,
    classes: usize,
    integer: bool,
) -> LabeledDataset {
    let instances = (0..size)
        .map(|i| {
            let len = rng.gen_range(lens.clone());
            let values = if integer {
                int_series(rng, len, 0, 4)
            } else {
                float_series(rng, len)
            };
            let class = if i < 2 { i } else { rng.gen_range(0..classes) };
            let label = ClassLabel::new(format!("c{class}")).unwrap();
            TimeSeries::labeled(values, label).unwrap()
        })
        .collect();
    LabeledDataset::new("random", instances).unwrap()
}

pub fn series(values: &[f64]) -> TimeSeries {
    TimeSeries::new(values.to_vec()).unwrap()
}

pub fn labeled(values: &[f64], label: &str) -> TimeSeries {
    TimeSeries::labeled(values.to_vec(), ClassLabel::new(label).unwrap()).unwrap()
}

/// Two instances `A = <0,0,0,0,0>`, `B = <0,0,5,0,0>` and the query
/// `<0,0,5,0,0>`.
pub fn tiny_fixture() -> (LabeledDataset, TimeSeries) {
    let ds = LabeledDataset::new(
        "tiny",
        vec![labeled(&[0., 0., 0., 0., 0.], "A"), labeled(&[0., 0., 5., 0., 0.], "B")],
    )
    .unwrap();
    (ds, series(&[0., 0., 5., 0., 0.]))
}

pub fn fixture_path(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests")
        .join("fixtures")
        .join(name)
}
