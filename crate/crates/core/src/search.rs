//! Minimum-length contiguous deletion that changes a k-NN DTW label.
//!
//! Deletions are enumerated by length ascending, then start ascending, with
//! both end-points of the query fixed. The first deletion whose modified
//! query receives a label different from the unmodified query's label is
//! the answer.
//!
//! The optimised path keeps the initial alignments of the query against
//! every training instance. Each modified query then gets, per instance,
//! - a prefix bound from row `l0 - 1` of the forward table,
//! - a suffix bound from row `n - l1` of the reversed table,
//! - and, if not pruned, a distance resumed from row `l0` of the forward
//!   table with abandoning at the current best distance.
//!
//! None of this changes the answer; [`Optimizations::naive`] runs the plain
//! enumeration for comparison.

use std::fmt;

use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::dtw::{self, AlignmentTable, Distance, DtwConfig};
use crate::error::{Error, Result};
use crate::knn::{self, NnStats, TablePair};
use crate::series::{ClassLabel, Deletion, LabeledDataset, TimeSeries};
use crate::triangle::{estimate_triangle_repair, TriangleRepair};

/// Forward and reversed tables for 1000 instances of length 512.
pub const DEFAULT_CACHE_BUDGET: usize = 1000 * 2 * 513 * 513 * std::mem::size_of::<f64>();

/// Which speed-ups the deletion search may use. The result never depends
/// on these.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Optimizations {
    /// Pruned, early-abandoning distance evaluation against the best-so-far.
    pub early_abandon: bool,
    /// Prefix/suffix row bounds from the initial alignments.
    pub row_bounds: bool,
    /// Resume modified alignments from cached forward tables.
    pub reuse: bool,
    /// Opt-in split-point bound combining prefix and suffix rows.
    pub split_bound: bool,
    /// Repaired-triangle pruning. Heuristic: every flip it reports is
    /// re-verified by a bound-free classification.
    pub unsound_triangle: bool,
    /// Triangles sampled when estimating the stretch; `None` = exhaustive.
    pub triangle_sample: Option<usize>,
    /// Upper limit on bytes of retained tables.
    pub cache_budget: usize,
}

impl Default for Optimizations {
    fn default() -> Self {
        Optimizations {
            early_abandon: true,
            row_bounds: true,
            reuse: true,
            split_bound: false,
            unsound_triangle: false,
            triangle_sample: Some(20_000),
            cache_budget: DEFAULT_CACHE_BUDGET,
        }
    }
}

impl Optimizations {
    pub fn naive() -> Self {
        Optimizations {
            early_abandon: false,
            row_bounds: false,
            reuse: false,
            ..Self::default()
        }
    }

    pub fn abandon_only() -> Self {
        Optimizations {
            early_abandon: true,
            ..Self::naive()
        }
    }

    pub fn abandon_and_bounds() -> Self {
        Optimizations {
            reuse: false,
            ..Self::default()
        }
    }

    pub fn with_split_bound(mut self) -> Self {
        self.split_bound = true;
        self
    }

    pub fn with_unsound_triangle(mut self) -> Self {
        self.unsound_triangle = true;
        self
    }

    pub fn with_cache_budget(mut self, bytes: usize) -> Self {
        self.cache_budget = bytes;
        self
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub counters: NnStats,
    pub deletions_evaluated: u64,
    /// The table cache did not fit its budget; only bound rows were kept.
    pub cache_degraded: bool,
    /// Heuristic flips rejected by the bound-free re-check.
    pub verification_failures: u64,
}

impl SearchStats {
    fn absorb(&mut self, e: &DeletionEval) {
        self.counters += e.stats;
        self.deletions_evaluated += 1;
        if e.verification_failed {
            self.verification_failures += 1;
        }
    }
}

impl fmt::Display for SearchStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = &self.counters;
        write!(
            f,
            "deletions={} dtw_calls={} full_computations={} abandons={} bound_prunes={} \
             heuristic_prunes={} rows={} resumed_rows={} cache_degraded={} verification_failures={}",
            self.deletions_evaluated,
            c.dtw_calls,
            c.full_computations,
            c.abandons,
            c.bound_prunes,
            c.heuristic_prunes,
            c.rows_computed,
            c.resumed_rows,
            self.cache_degraded,
            self.verification_failures
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Flip {
        deletion: Deletion,
        original: ClassLabel,
        flipped: ClassLabel,
    },
    NoFlip {
        original: ClassLabel,
    },
}

#[derive(Debug, Clone)]
pub struct SearchResult {
    pub outcome: Outcome,
    pub stats: SearchStats,
}

impl SearchResult {
    pub fn deletion(&self) -> Option<Deletion> {
        match &self.outcome {
            Outcome::Flip { deletion, .. } => Some(*deletion),
            Outcome::NoFlip { .. } => None,
        }
    }

    /// Short hex digest of the outcome, independent of the counters.
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        match &self.outcome {
            Outcome::Flip {
                deletion,
                original,
                flipped,
            } => {
                h.update(b"flip");
                h.update((deletion.start() as u64).to_le_bytes());
                h.update((deletion.end() as u64).to_le_bytes());
                h.update(original.as_str().as_bytes());
                h.update([0]);
                h.update(flipped.as_str().as_bytes());
            }
            Outcome::NoFlip { original } => {
                h.update(b"noflip");
                h.update(original.as_str().as_bytes());
            }
        }
        short_hex(h)
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::Flip {
                deletion,
                original,
                flipped,
            } => write!(
                f,
                "FLIP start={} length={} from={} to={}",
                deletion.start(),
                deletion.len(),
                original,
                flipped
            ),
            Outcome::NoFlip { .. } => f.write_str("NOFLIP"),
        }
    }
}

pub(crate) fn short_hex(h: Sha256) -> String {
    h.finalize()[..8].iter().map(|b| format!("{b:02x}")).collect()
}

/// Runs the deletion search with the given optimisations.
pub fn find_min_deletion(
    dataset: &LabeledDataset,
    query: &TimeSeries,
    k: usize,
    cfg: DtwConfig,
    opts: Optimizations,
) -> Result<SearchResult> {
    let explainer = Explainer::new(dataset, query, k, cfg, opts)?;
    let n = query.len();
    let mut stats = explainer.base_stats;
    for len in 1..=n - 2 {
        let evals: Vec<(Deletion, DeletionEval)> = (2..=n - len)
            .into_par_iter()
            .map(|start| {
                let d = Deletion::from_start_len(start, len).expect("legal by construction");
                (d, explainer.evaluate(d))
            })
            .collect();
        for (_, e) in &evals {
            stats.absorb(e);
        }
        if let Some((d, e)) = evals.into_iter().find(|(_, e)| e.flips) {
            return Ok(SearchResult {
                outcome: Outcome::Flip {
                    deletion: d,
                    original: explainer.original.clone(),
                    flipped: e.label.expect("a flip has a label"),
                },
                stats,
            });
        }
    }
    Ok(SearchResult {
        outcome: Outcome::NoFlip {
            original: explainer.original.clone(),
        },
        stats,
    })
}

/// The deletion search with row bounds, abandoning and table reuse.
pub fn search_with_reuse(
    dataset: &LabeledDataset,
    query: &TimeSeries,
    k: usize,
    cfg: DtwConfig,
) -> Result<SearchResult> {
    find_min_deletion(dataset, query, k, cfg, Optimizations::default())
}

pub(crate) struct DeletionEval {
    pub label: Option<ClassLabel>,
    pub flips: bool,
    pub stats: NnStats,
    pub verification_failed: bool,
}

/// Retained state of the unmodified query.
struct Cache {
    /// Rounding-safe row minima of the forward tables, per instance.
    prefix: Vec<Vec<f64>>,
    /// Rounding-safe row minima of the reversed tables, per instance.
    suffix: Vec<Vec<f64>>,
    forward: Option<Vec<AlignmentTable>>,
    reversed: Option<Vec<AlignmentTable>>,
}

/// Initial classification of one query plus whatever it retained for the
/// modified-query searches that follow.
pub(crate) struct Explainer<'a> {
    dataset: &'a LabeledDataset,
    query: &'a TimeSeries,
    k: usize,
    cfg: DtwConfig,
    opts: Optimizations,
    original: ClassLabel,
    cache: Option<Cache>,
    triangle: Option<TriangleRepair>,
    base_stats: SearchStats,
}

impl<'a> Explainer<'a> {
    pub fn new(
        dataset: &'a LabeledDataset,
        query: &'a TimeSeries,
        k: usize,
        cfg: DtwConfig,
        mut opts: Optimizations,
    ) -> Result<Self> {
        if query.len() < 3 {
            return Err(Error::Argument(format!(
                "query of length {} has no removable interior points",
                query.len()
            )));
        }
        knn::check_k(dataset, k)?;
        for s in dataset.instances() {
            cfg.check(query.len(), s.len())?;
        }
        let mut base_stats = SearchStats::default();

        let wants_tables = opts.row_bounds || opts.reuse || opts.split_bound;
        let (original, cache) = if wants_tables {
            if let Err(Error::MemoryBudgetExceeded { .. }) = check_budget(dataset, query, &opts) {
                base_stats.cache_degraded = true;
                opts.reuse = false;
                opts.split_bound = false;
            }
            let (original, cache, nn) = build_cache(dataset, query, k, cfg, &opts);
            base_stats.counters += nn;
            (original, Some(cache))
        } else {
            let mut nn = NnStats::default();
            let abandon = opts.early_abandon;
            let best = knn::search(dataset.len(), k, None, None, &mut nn, |i, tau| {
                let tau = if abandon { tau } else { None };
                let (d, rows) = dtw::rolling(query.values(), dataset.instance(i).values(), cfg, tau);
                (d, rows, true)
            });
            base_stats.counters += nn;
            let label = knn::vote(&knn::to_neighbors(dataset, &best)).expect("k >= 1");
            (label, None)
        };

        let triangle = if opts.unsound_triangle && dataset.len() >= 3 {
            Some(estimate_triangle_repair(dataset, cfg, opts.triangle_sample, 0)?)
        } else {
            None
        };

        Ok(Explainer {
            dataset,
            query,
            k,
            cfg,
            opts,
            original,
            cache,
            triangle,
            base_stats,
        })
    }

    pub fn base_stats(&self) -> SearchStats {
        self.base_stats
    }

    /// Classifies the query with `deletion` removed and tests for a flip.
    pub fn evaluate(&self, deletion: Deletion) -> DeletionEval {
        let (label, stats) = self.classify_modified(deletion, self.triangle.as_ref());
        let mut flips = label.as_ref().is_some_and(|l| *l != self.original);
        let mut verification_failed = false;
        let mut stats = stats;
        if flips && self.triangle.is_some() {
            let (checked, extra) = self.classify_modified(deletion, None);
            stats += extra;
            if checked != label {
                verification_failed = true;
                flips = checked.as_ref().is_some_and(|l| *l != self.original);
            }
        }
        DeletionEval {
            label,
            flips,
            stats,
            verification_failed,
        }
    }

    fn classify_modified(
        &self,
        deletion: Deletion,
        triangle: Option<&TriangleRepair>,
    ) -> (Option<ClassLabel>, NnStats) {
        let n = self.query.len();
        let modified = deletion.apply(self.query.values());
        let n2 = modified.len();
        let l0 = deletion.start();
        let cfg = self.cfg;
        let instances = self.dataset.instances();
        let feasible = |i: usize| cfg.is_feasible(n2, instances[i].len());

        let lbs: Option<Vec<f64>> = match &self.cache {
            Some(cache) if self.opts.row_bounds => Some(
                (0..instances.len())
                    .map(|i| {
                        if !feasible(i) {
                            return f64::INFINITY;
                        }
                        let mut b = cache.prefix[i][l0 - 1].max(cache.suffix[i][n - deletion.end()]);
                        if let (Some(fwd), Some(rev)) = (&cache.forward, &cache.reversed) {
                            b = b.max(dtw::split_lower_bound(&fwd[i], &rev[i], deletion));
                        }
                        b
                    })
                    .collect(),
            ),
            _ => None,
        };
        let forward = self
            .cache
            .as_ref()
            .and_then(|c| c.forward.as_ref())
            .filter(|_| self.opts.reuse);
        let abandon = self.opts.early_abandon;

        let mut stats = NnStats::default();
        let best = knn::search(
            instances.len(),
            self.k,
            lbs.as_deref(),
            triangle,
            &mut stats,
            |i, tau| {
                if !feasible(i) {
                    return (Distance::Exact(f64::INFINITY), 0, false);
                }
                let tau = if abandon { tau } else { None };
                let cand = instances[i].values();
                match forward {
                    Some(tables) => {
                        let (d, rows) = dtw::resume_rows(&tables[i], &modified, l0, cand, tau);
                        (d, rows, false)
                    }
                    None => {
                        let (d, rows) = dtw::rolling(&modified, cand, cfg, tau);
                        (d, rows, true)
                    }
                }
            },
        );
        if forward.is_some() {
            stats.resumed_rows = stats.rows_computed;
        }
        (knn::vote(&knn::to_neighbors(self.dataset, &best)), stats)
    }
}

fn check_budget(dataset: &LabeledDataset, query: &TimeSeries, opts: &Optimizations) -> Result<()> {
    if !(opts.reuse || opts.split_bound) {
        return Ok(());
    }
    let per_pair = |m: usize| {
        let t = AlignmentTable::bytes_for(query.len(), m);
        if opts.split_bound {
            2 * t
        } else {
            t
        }
    };
    let required: usize = dataset.instances().iter().map(|s| per_pair(s.len())).sum();
    if required > opts.cache_budget {
        return Err(Error::MemoryBudgetExceeded {
            required,
            budget: opts.cache_budget,
        });
    }
    Ok(())
}

fn build_cache(
    dataset: &LabeledDataset,
    query: &TimeSeries,
    k: usize,
    cfg: DtwConfig,
    opts: &Optimizations,
) -> (ClassLabel, Cache, NnStats) {
    let keep_forward = opts.reuse || opts.split_bound;
    let keep_reversed = opts.split_bound;
    type Entry = (f64, Vec<f64>, Vec<f64>, Option<AlignmentTable>, Option<AlignmentTable>);
    let entries: Vec<Entry> = dataset
        .instances()
        .par_iter()
        .enumerate()
        .map(|(i, s)| {
            let pair = TablePair::compute(query.values(), s.values(), i, cfg);
            let prefix = dtw::safe_row_minima(&pair.forward);
            let suffix = dtw::safe_row_minima(&pair.reversed);
            let d = pair.forward.distance();
            (
                d,
                prefix,
                suffix,
                keep_forward.then_some(pair.forward),
                keep_reversed.then_some(pair.reversed),
            )
        })
        .collect();

    let mut stats = NnStats::default();
    let count = entries.len() as u64;
    stats.dtw_calls = 2 * count;
    stats.full_computations = 2 * count;
    stats.rows_computed = 2 * count * query.len() as u64;

    let mut ranked: Vec<(usize, f64)> = entries.iter().enumerate().map(|(i, e)| (i, e.0)).collect();
    ranked.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
    ranked.truncate(k);
    let original = knn::vote(&knn::to_neighbors(dataset, &ranked)).expect("k >= 1");

    let mut cache = Cache {
        prefix: Vec::with_capacity(entries.len()),
        suffix: Vec::with_capacity(entries.len()),
        forward: keep_forward.then(Vec::new),
        reversed: keep_reversed.then(Vec::new),
    };
    for (_, p, s, f, r) in entries {
        cache.prefix.push(p);
        cache.suffix.push(s);
        if let (Some(v), Some(t)) = (cache.forward.as_mut(), f) {
            v.push(t);
        }
        if let (Some(v), Some(t)) = (cache.reversed.as_mut(), r) {
            v.push(t);
        }
    }
    (original, cache, stats)
}
