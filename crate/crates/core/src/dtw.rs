//! Exact dynamic time warping with absolute-difference local cost.
//!
//! The cost grid is `(n + 1) x (m + 1)` with `D[0][0] = 0` and the rest of
//! row 0 and column 0 at `+inf`. Rows follow the query, columns the
//! candidate. Every routine here fills rows in the same order with the same
//! `min(diag, up, left)` evaluation, so a table resumed from a cached prefix
//! is bit-identical to one computed from scratch.
//!
//! When a threshold is supplied the computation
//! - skips any cell whose cheapest predecessor is already `>= threshold`
//!   (writing `+inf`), and
//! - abandons after any completed row whose minimum is `>= threshold`.
//!
//! Both rules only discard cells that cannot lie on a path cheaper than the
//! threshold, so any result below the threshold is exact.

use crate::error::{Error, Result};
use crate::series::{Deletion, TimeSeries};

const INF: f64 = f64::INFINITY;

/// Warping constraint. The local distance is fixed to `|a - b|`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct DtwConfig {
    /// Sakoe-Chiba half-width: cell `(i, j)` is admissible iff `|i - j| <= w`.
    pub window: Option<usize>,
}

impl DtwConfig {
    pub fn unconstrained() -> Self {
        DtwConfig { window: None }
    }

    pub fn with_window(window: usize) -> Self {
        DtwConfig {
            window: Some(window),
        }
    }

    pub fn is_feasible(&self, n: usize, m: usize) -> bool {
        match self.window {
            None => true,
            Some(w) => w >= n.abs_diff(m),
        }
    }

    pub fn check(&self, n: usize, m: usize) -> Result<()> {
        if n == 0 || m == 0 {
            return Err(Error::Argument("DTW needs non-empty series".into()));
        }
        if !self.is_feasible(n, m) {
            return Err(Error::Argument(format!(
                "window {} is narrower than the length difference of {n} and {m}",
                self.window.unwrap_or(0)
            )));
        }
        Ok(())
    }

    /// Admissible column range of row `i` (1-based), possibly empty.
    #[inline]
    fn columns(&self, i: usize, m: usize) -> (usize, usize) {
        match self.window {
            None => (1, m),
            Some(w) => (i.saturating_sub(w).max(1), (i + w).min(m)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Reversed,
}

/// Complete cumulative-cost grid of one alignment.
#[derive(Debug, Clone, PartialEq)]
pub struct AlignmentTable {
    query_len: usize,
    candidate_len: usize,
    cells: Vec<f64>,
    direction: Direction,
    candidate: usize,
    config: DtwConfig,
}

impl AlignmentTable {
    pub fn query_len(&self) -> usize {
        self.query_len
    }

    pub fn candidate_len(&self) -> usize {
        self.candidate_len
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    /// Position of the aligned training instance in its dataset.
    pub fn candidate(&self) -> usize {
        self.candidate
    }

    pub fn config(&self) -> DtwConfig {
        self.config
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.cells[i * (self.candidate_len + 1) + j]
    }

    /// Row `i` including the column-0 boundary cell.
    pub fn row(&self, i: usize) -> &[f64] {
        let w = self.candidate_len + 1;
        &self.cells[i * w..(i + 1) * w]
    }

    pub fn distance(&self) -> f64 {
        self.get(self.query_len, self.candidate_len)
    }

    /// Minimum of every row, row 0 included.
    pub fn row_minima(&self) -> Vec<f64> {
        (0..=self.query_len).map(|i| row_min(self.row(i))).collect()
    }

    pub fn bytes(&self) -> usize {
        Self::bytes_for(self.query_len, self.candidate_len)
    }

    pub fn bytes_for(n: usize, m: usize) -> usize {
        (n + 1) * (m + 1) * std::mem::size_of::<f64>()
    }
}

/// Result of one distance evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Distance {
    Exact(f64),
    /// The true distance is at least the carried threshold.
    Abandoned(f64),
}

impl Distance {
    pub fn exact(self) -> Option<f64> {
        match self {
            Distance::Exact(d) => Some(d),
            Distance::Abandoned(_) => None,
        }
    }

    pub fn is_abandoned(self) -> bool {
        matches!(self, Distance::Abandoned(_))
    }
}

#[derive(Debug, Clone)]
pub struct DtwOutcome {
    pub distance: Distance,
    /// Present only when the caller asked for retention.
    pub table: Option<AlignmentTable>,
    /// DP rows actually filled by this call.
    pub rows_computed: usize,
}

/// DTW between `s` (rows) and `t` (columns).
///
/// `threshold` enables pruning and abandoning; `retain_table` disables both
/// and returns the full grid.
pub fn dtw_distance(
    s: &TimeSeries,
    t: &TimeSeries,
    cfg: DtwConfig,
    threshold: Option<f64>,
    retain_table: bool,
) -> Result<DtwOutcome> {
    cfg.check(s.len(), t.len())?;
    if retain_table {
        let table = full_table(s.values(), t.values(), cfg, Direction::Forward, 0);
        Ok(DtwOutcome {
            distance: Distance::Exact(table.distance()),
            rows_computed: s.len(),
            table: Some(table),
        })
    } else {
        let (distance, rows_computed) = rolling(s.values(), t.values(), cfg, threshold);
        Ok(DtwOutcome {
            distance,
            table: None,
            rows_computed,
        })
    }
}

/// Plain distance with no threshold.
pub fn dtw(s: &[f64], t: &[f64], cfg: DtwConfig) -> f64 {
    match rolling(s, t, cfg, None).0 {
        Distance::Exact(d) => d,
        Distance::Abandoned(_) => unreachable!("no threshold was given"),
    }
}

/// Recomputes the alignment of `modified = T with d removed` against the
/// candidate of `cached`, copying rows `0..l0` from the cached table of the
/// unmodified query and filling only rows `l0..=|modified|`.
pub fn dtw_resume(
    cached: &AlignmentTable,
    modified: &TimeSeries,
    deletion: Deletion,
    candidate: &TimeSeries,
    cfg: DtwConfig,
    threshold: Option<f64>,
) -> Result<DtwOutcome> {
    if cached.direction != Direction::Forward {
        return Err(Error::Argument("resume needs a forward table".into()));
    }
    if cached.config != cfg {
        return Err(Error::Argument(
            "resume config differs from the cached table's config".into(),
        ));
    }
    if cached.candidate_len != candidate.len()
        || cached.query_len != modified.len() + deletion.len()
    {
        return Err(Error::Argument(format!(
            "cached table is {}x{} but the pair implies {}x{}",
            cached.query_len,
            cached.candidate_len,
            modified.len() + deletion.len(),
            candidate.len()
        )));
    }
    deletion.check(cached.query_len)?;
    cfg.check(modified.len(), candidate.len())?;
    let (distance, rows_computed) = resume_rows(
        cached,
        modified.values(),
        deletion.start(),
        candidate.values(),
        threshold,
    );
    Ok(DtwOutcome {
        distance,
        table: None,
        rows_computed,
    })
}

/// Same as [`dtw_resume`] but returns the full resumed table.
pub fn dtw_resume_table(
    cached: &AlignmentTable,
    modified: &TimeSeries,
    deletion: Deletion,
    candidate: &TimeSeries,
) -> Result<AlignmentTable> {
    deletion.check(cached.query_len)?;
    let cfg = cached.config;
    cfg.check(modified.len(), candidate.len())?;
    let n = modified.len();
    let m = candidate.len();
    let w = m + 1;
    let l0 = deletion.start();
    let mut cells = vec![INF; (n + 1) * w];
    cells[..l0 * w].copy_from_slice(&cached.cells[..l0 * w]);
    for i in l0..=n {
        let (done, rest) = cells.split_at_mut(i * w);
        fill_row(
            modified.values()[i - 1],
            i,
            candidate.values(),
            cfg,
            &done[(i - 1) * w..],
            &mut rest[..w],
            INF,
        );
    }
    Ok(AlignmentTable {
        query_len: n,
        candidate_len: m,
        cells,
        direction: Direction::Forward,
        candidate: cached.candidate,
        config: cfg,
    })
}

/// Lower bound on the modified distance read off row `l0 - 1` of the
/// forward table of the unmodified query.
pub fn row_lower_bound(cached: &AlignmentTable, deletion: Deletion) -> f64 {
    let raw = row_min(cached.row(deletion.start() - 1));
    rounding_safe(raw, cached.query_len, cached.candidate_len)
}

/// Lower bound read off row `n - l1` of the table aligning the reversed
/// query with the reversed candidate.
pub fn suffix_lower_bound(cached_rev: &AlignmentTable, deletion: Deletion, n: usize) -> f64 {
    let raw = row_min(cached_rev.row(n - deletion.end()));
    rounding_safe(raw, cached_rev.query_len, cached_rev.candidate_len)
}

/// Split-point bound: every warping path of the modified query crosses from
/// row `l0 - 1` to the first row after the deletion by a vertical or
/// diagonal step, so the cheapest combination of a cached prefix cell and a
/// cached reversed suffix cell bounds the whole path from below. Without a
/// window this equals the modified distance up to rounding.
pub fn split_lower_bound(
    forward: &AlignmentTable,
    reversed: &AlignmentTable,
    deletion: Deletion,
) -> f64 {
    let n = forward.query_len;
    let m = forward.candidate_len;
    let prefix = forward.row(deletion.start() - 1);
    let suffix = reversed.row(n - deletion.end());
    let mut best = INF;
    for j in 1..=m {
        let p = prefix[j];
        if p == INF {
            continue;
        }
        // Column j' of the forward suffix is column m - j' + 1 reversed.
        let down = suffix[m - j + 1];
        let diag = if j < m { suffix[m - j] } else { INF };
        best = best.min(p + down.min(diag));
    }
    rounding_safe(best, n, m)
}

/// Row minima of a reversed table, shrunk for rounding, indexed by row.
pub(crate) fn safe_row_minima(table: &AlignmentTable) -> Vec<f64> {
    table
        .row_minima()
        .into_iter()
        .map(|v| rounding_safe(v, table.query_len, table.candidate_len))
        .collect()
}

/// Bounds read from tables filled in a different summation order than the
/// exact distance they bound may exceed it by accumulated rounding; shrink
/// them by a margin covering `n + m` additions.
#[inline]
fn rounding_safe(raw: f64, n: usize, m: usize) -> f64 {
    if raw.is_infinite() || raw == 0.0 {
        return raw;
    }
    raw - raw * (2 * (n + m + 1)) as f64 * f64::EPSILON
}

#[inline]
fn row_min(row: &[f64]) -> f64 {
    row.iter().copied().fold(INF, f64::min)
}

/// Fills row `i` of the grid from `prev` into `cur` (both of length m + 1).
/// Cells whose cheapest predecessor is `>= prune_at` become `+inf`.
/// Returns the row minimum.
#[inline]
fn fill_row(
    value: f64,
    i: usize,
    cand: &[f64],
    cfg: DtwConfig,
    prev: &[f64],
    cur: &mut [f64],
    prune_at: f64,
) -> f64 {
    let m = cand.len();
    let (lo, hi) = cfg.columns(i, m);
    if cfg.window.is_some() {
        cur.fill(INF);
    } else {
        cur[0] = INF;
    }
    let mut left = INF;
    let mut minimum = INF;
    for j in lo..=hi {
        let best = prev[j - 1].min(prev[j]).min(left);
        let v = if best >= prune_at {
            INF
        } else {
            (value - cand[j - 1]).abs() + best
        };
        cur[j] = v;
        left = v;
        minimum = minimum.min(v);
    }
    minimum
}

fn boundary_row(m: usize) -> Vec<f64> {
    let mut row = vec![INF; m + 1];
    row[0] = 0.0;
    row
}

pub(crate) fn full_table(
    query: &[f64],
    cand: &[f64],
    cfg: DtwConfig,
    direction: Direction,
    candidate: usize,
) -> AlignmentTable {
    let n = query.len();
    let m = cand.len();
    let w = m + 1;
    let mut cells = vec![INF; (n + 1) * w];
    cells[0] = 0.0;
    for i in 1..=n {
        let (done, rest) = cells.split_at_mut(i * w);
        fill_row(
            query[i - 1],
            i,
            cand,
            cfg,
            &done[(i - 1) * w..],
            &mut rest[..w],
            INF,
        );
    }
    AlignmentTable {
        query_len: n,
        candidate_len: m,
        cells,
        direction,
        candidate,
        config: cfg,
    }
}

/// Two-row evaluation. Returns the outcome and the number of rows filled.
pub(crate) fn rolling(
    query: &[f64],
    cand: &[f64],
    cfg: DtwConfig,
    threshold: Option<f64>,
) -> (Distance, usize) {
    let prev = boundary_row(cand.len());
    run_rows(query, 1, cand, cfg, prev, threshold)
}

pub(crate) fn resume_rows(
    cached: &AlignmentTable,
    modified: &[f64],
    l0: usize,
    cand: &[f64],
    threshold: Option<f64>,
) -> (Distance, usize) {
    let seed = cached.row(l0 - 1);
    if let Some(tau) = threshold {
        if row_min(seed) >= tau {
            return (Distance::Abandoned(tau), 0);
        }
    }
    run_rows(modified, l0, cand, cached.config, seed.to_vec(), threshold)
}

fn run_rows(
    query: &[f64],
    first_row: usize,
    cand: &[f64],
    cfg: DtwConfig,
    mut prev: Vec<f64>,
    threshold: Option<f64>,
) -> (Distance, usize) {
    let n = query.len();
    let m = cand.len();
    let prune_at = threshold.unwrap_or(INF);
    let mut cur = vec![INF; m + 1];
    let mut rows = 0;
    for i in first_row..=n {
        let minimum = fill_row(query[i - 1], i, cand, cfg, &prev, &mut cur, prune_at);
        rows += 1;
        if threshold.is_some() && minimum >= prune_at {
            return (Distance::Abandoned(prune_at), rows);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    let d = prev[m];
    match threshold {
        Some(tau) if d >= tau => (Distance::Abandoned(tau), rows),
        _ => (Distance::Exact(d), rows),
    }
}
