//! k-nearest-neighbour classification under DTW.
//!
//! Candidates are visited best-first by their cheapest lower bound. A
//! candidate is skipped when its bound already exceeds the current k-th best
//! distance `tau`, and surviving candidates are evaluated with `tau` as the
//! abandoning threshold. With sound bounds the neighbours found are exactly
//! those of a plain linear scan.
//!
//! Ties: equal distances prefer the lower dataset index. A tied vote prefers
//! the label whose members have the smaller summed distance, then the
//! lexicographically smaller token.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::dtw::{self, AlignmentTable, Direction, Distance, DtwConfig};
use crate::error::{Error, Result};
use crate::series::{ClassLabel, LabeledDataset, TimeSeries};
use crate::triangle::TriangleRepair;

#[derive(Debug, Clone, PartialEq)]
pub struct Neighbor {
    /// 0-based position in dataset order.
    pub index: usize,
    pub distance: f64,
    pub label: ClassLabel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Soundness {
    /// Never exceeds the true distance.
    Sound,
    /// May exceed the true distance; excluded from exact searches.
    Heuristic,
}

/// A lower bound on the DTW distance between a query and one training
/// instance.
pub trait LowerBound: Send + Sync {
    fn lower_bound(&self, query: &TimeSeries, index: usize, candidate: &TimeSeries) -> f64;

    fn soundness(&self) -> Soundness;

    fn name(&self) -> &str;
}

/// `|Q_1 - S_1| + |Q_n - S_m|`: both corner cells lie on every warping path.
#[derive(Debug, Clone, Copy, Default)]
pub struct EndpointBound;

impl LowerBound for EndpointBound {
    fn lower_bound(&self, query: &TimeSeries, _index: usize, candidate: &TimeSeries) -> f64 {
        let q = query.values();
        let s = candidate.values();
        let first = (q[0] - s[0]).abs();
        if q.len() == 1 && s.len() == 1 {
            first
        } else {
            first + (q[q.len() - 1] - s[s.len() - 1]).abs()
        }
    }

    fn soundness(&self) -> Soundness {
        Soundness::Sound
    }

    fn name(&self) -> &str {
        "endpoint"
    }
}

/// Ordered cascade of lower bounds plus the optional repaired-triangle
/// bound, which is evaluated against distances computed during the search.
#[derive(Clone, Default)]
pub struct BoundProvider {
    cascade: Vec<Arc<dyn LowerBound>>,
    triangle: Option<Arc<TriangleRepair>>,
    allow_heuristic: bool,
}

impl BoundProvider {
    /// No bounds: a plain linear scan with abandoning.
    pub fn none() -> Self {
        Self::default()
    }

    pub fn sound() -> Self {
        Self::none().with(Arc::new(EndpointBound))
    }

    pub fn with(mut self, bound: Arc<dyn LowerBound>) -> Self {
        self.cascade.push(bound);
        self
    }

    /// Adds the repaired-triangle bound and permits heuristic bounds.
    pub fn with_triangle(mut self, repair: Arc<TriangleRepair>) -> Self {
        self.triangle = Some(repair);
        self.allow_heuristic = true;
        self
    }

    pub fn allow_heuristic(mut self, allow: bool) -> Self {
        self.allow_heuristic = allow;
        self
    }

    pub fn is_exact(&self) -> bool {
        !self.allow_heuristic
            || (self.triangle.is_none()
                && self.cascade.iter().all(|b| b.soundness() == Soundness::Sound))
    }

    fn active(&self) -> impl Iterator<Item = &Arc<dyn LowerBound>> {
        let allow = self.allow_heuristic;
        self.cascade
            .iter()
            .filter(move |b| allow || b.soundness() == Soundness::Sound)
    }

    fn triangle(&self) -> Option<&TriangleRepair> {
        if self.allow_heuristic {
            self.triangle.as_deref()
        } else {
            None
        }
    }
}

/// Counters gathered by one or more nearest-neighbour searches.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct NnStats {
    /// Distance evaluations started, from scratch or resumed.
    pub dtw_calls: u64,
    /// Evaluations that filled every row from row 1 without abandoning.
    pub full_computations: u64,
    pub abandons: u64,
    /// Candidates skipped because a sound bound exceeded `tau`.
    pub bound_prunes: u64,
    /// Candidates skipped by the repaired-triangle bound.
    pub heuristic_prunes: u64,
    /// DP rows filled.
    pub rows_computed: u64,
    /// Rows filled while resuming cached alignments.
    pub resumed_rows: u64,
}

impl std::ops::AddAssign for NnStats {
    fn add_assign(&mut self, o: Self) {
        self.dtw_calls += o.dtw_calls;
        self.full_computations += o.full_computations;
        self.abandons += o.abandons;
        self.bound_prunes += o.bound_prunes;
        self.heuristic_prunes += o.heuristic_prunes;
        self.rows_computed += o.rows_computed;
        self.resumed_rows += o.resumed_rows;
    }
}

/// Forward and reversed full tables of the query against one instance.
#[derive(Debug, Clone)]
pub struct TablePair {
    pub forward: AlignmentTable,
    /// Always unconstrained, so its rows bound windowed distances as well.
    pub reversed: AlignmentTable,
}

impl TablePair {
    pub fn compute(query: &[f64], candidate: &[f64], index: usize, cfg: DtwConfig) -> Self {
        let forward = dtw::full_table(query, candidate, cfg, Direction::Forward, index);
        let rq: Vec<f64> = query.iter().rev().copied().collect();
        let rc: Vec<f64> = candidate.iter().rev().copied().collect();
        let reversed = dtw::full_table(
            &rq,
            &rc,
            DtwConfig::unconstrained(),
            Direction::Reversed,
            index,
        );
        TablePair { forward, reversed }
    }
}

#[derive(Debug, Clone)]
pub struct Classification {
    pub label: ClassLabel,
    /// Sorted by (distance, index).
    pub neighbors: Vec<Neighbor>,
    /// One pair per training instance, in dataset order, when retained.
    pub tables: Option<Vec<TablePair>>,
    pub stats: NnStats,
}

/// Classifies `query` by majority vote among its `k` nearest instances.
pub fn classify(
    dataset: &LabeledDataset,
    query: &TimeSeries,
    k: usize,
    cfg: DtwConfig,
    bounds: &BoundProvider,
    retain_tables: bool,
) -> Result<Classification> {
    check_k(dataset, k)?;
    for s in dataset.instances() {
        cfg.check(query.len(), s.len())?;
    }
    let mut stats = NnStats::default();
    if retain_tables {
        let tables: Vec<TablePair> = dataset
            .instances()
            .iter()
            .enumerate()
            .map(|(i, s)| TablePair::compute(query.values(), s.values(), i, cfg))
            .collect();
        stats.dtw_calls = 2 * tables.len() as u64;
        stats.full_computations = stats.dtw_calls;
        stats.rows_computed = 2 * (query.len() * tables.len()) as u64;
        let mut all: Vec<(usize, f64)> = tables
            .iter()
            .enumerate()
            .map(|(i, t)| (i, t.forward.distance()))
            .collect();
        all.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
        all.truncate(k);
        let neighbors = to_neighbors(dataset, &all);
        let label = vote(&neighbors).expect("k >= 1");
        return Ok(Classification {
            label,
            neighbors,
            tables: Some(tables),
            stats,
        });
    }

    let lbs = if bounds.active().next().is_some() {
        Some(
            dataset
                .instances()
                .iter()
                .enumerate()
                .map(|(i, s)| {
                    bounds
                        .active()
                        .map(|b| b.lower_bound(query, i, s))
                        .fold(0.0, f64::max)
                })
                .collect::<Vec<_>>(),
        )
    } else {
        None
    };
    let best = search(
        dataset.len(),
        k,
        lbs.as_deref(),
        bounds.triangle(),
        &mut stats,
        |i, tau| {
            let (d, rows) =
                dtw::rolling(query.values(), dataset.instance(i).values(), cfg, tau);
            (d, rows, true)
        },
    );
    let neighbors = to_neighbors(dataset, &best);
    let label = vote(&neighbors).ok_or_else(|| {
        Error::Argument("no training instance is reachable under the window".into())
    })?;
    Ok(Classification {
        label,
        neighbors,
        tables: None,
        stats,
    })
}

pub(crate) fn check_k(dataset: &LabeledDataset, k: usize) -> Result<()> {
    if k == 0 || k > dataset.len() {
        return Err(Error::Argument(format!(
            "k must be between 1 and the dataset size {}, got {k}",
            dataset.len()
        )));
    }
    Ok(())
}

pub(crate) fn to_neighbors(dataset: &LabeledDataset, best: &[(usize, f64)]) -> Vec<Neighbor> {
    best.iter()
        .map(|&(index, distance)| Neighbor {
            index,
            distance,
            label: dataset.label(index).clone(),
        })
        .collect()
}

/// Majority label; `None` only for an empty neighbour list.
pub fn vote(neighbors: &[Neighbor]) -> Option<ClassLabel> {
    let mut tally: BTreeMap<&ClassLabel, (usize, f64)> = BTreeMap::new();
    for n in neighbors {
        let e = tally.entry(&n.label).or_insert((0, 0.0));
        e.0 += 1;
        e.1 += n.distance;
    }
    // BTreeMap iterates labels in ascending token order, so keeping the first
    // of equal (count, sum) entries realises the lexicographic tie-break.
    let mut best: Option<(&ClassLabel, usize, f64)> = None;
    for (label, (count, sum)) in tally {
        let better = match best {
            None => true,
            Some((_, c, s)) => count > c || (count == c && sum < s),
        };
        if better {
            best = Some((label, count, sum));
        }
    }
    best.map(|(l, _, _)| l.clone())
}

/// Best-first k-NN core shared by plain classification and deletion search.
///
/// `eval(i, tau)` returns the distance of instance `i` (abandoning at `tau`
/// when given), the rows filled and whether it started from row 1.
/// Instances with infinite bound or distance are unreachable and never
/// become neighbours. Returns up to `k` pairs sorted by (distance, index).
pub(crate) fn search<F>(
    count: usize,
    k: usize,
    lbs: Option<&[f64]>,
    triangle: Option<&TriangleRepair>,
    stats: &mut NnStats,
    mut eval: F,
) -> Vec<(usize, f64)>
where
    F: FnMut(usize, Option<f64>) -> (Distance, usize, bool),
{
    let mut order: Vec<usize> = (0..count).collect();
    if let Some(lbs) = lbs {
        order.sort_by(|&a, &b| lbs[a].total_cmp(&lbs[b]).then(a.cmp(&b)));
    }
    let mut best: Vec<(usize, f64)> = Vec::with_capacity(k + 1);
    let mut anchors: Vec<(usize, f64)> = Vec::new();

    for (pos, &idx) in order.iter().enumerate() {
        let lb = lbs.map(|l| l[idx]);
        if lb == Some(f64::INFINITY) {
            stats.bound_prunes += (order.len() - pos) as u64;
            break;
        }
        let mut tau = None;
        if best.len() == k {
            let (kth_idx, kth) = best[k - 1];
            if let Some(lb) = lb {
                if lb > kth {
                    // Bounds are visited in ascending order.
                    stats.bound_prunes += (order.len() - pos) as u64;
                    break;
                }
                if lb == kth && idx > kth_idx {
                    stats.bound_prunes += 1;
                    continue;
                }
            }
            if let Some(tr) = triangle {
                let h = tr.lower_bound(&anchors, idx);
                if h > kth || (h == kth && idx > kth_idx) {
                    stats.heuristic_prunes += 1;
                    continue;
                }
            }
            // A lower index wins ties, so it must beat tau only weakly.
            tau = Some(if idx > kth_idx { kth } else { kth.next_up() });
        }
        let (d, rows, from_start) = eval(idx, tau);
        stats.dtw_calls += 1;
        stats.rows_computed += rows as u64;
        match d {
            Distance::Abandoned(_) => stats.abandons += 1,
            Distance::Exact(d) => {
                if from_start {
                    stats.full_computations += 1;
                }
                if d.is_finite() {
                    if triangle.is_some() {
                        anchors.push((idx, d));
                    }
                    let at = best
                        .iter()
                        .position(|&(bi, bd)| d < bd || (d == bd && idx < bi))
                        .unwrap_or(best.len());
                    if at < k {
                        best.insert(at, (idx, d));
                        best.truncate(k);
                    }
                }
            }
        }
    }
    best
}
