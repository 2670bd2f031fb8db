//! Scalability harness: relevance of one query under each optimisation
//! variant, over a grid of dataset sizes and series lengths.
//!
//! Every variant must produce the same relevance digest for the same
//! problem; a mismatch aborts the run.

use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use crate::dtw::DtwConfig;
use crate::error::{Error, Result};
use crate::relevance::{compute_relevance_with, RelevanceConfig};
use crate::search::{Optimizations, SearchStats};
use crate::synth::bench_problem;

pub const REPORT_HEADER: &str = "variant,n,dataset_size,wall_seconds,dtw_calls,prunes,digest";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    Naive,
    Abandon,
    AbandonBounds,
    AbandonBoundsReuse,
}

impl Variant {
    pub const ALL: [Variant; 4] = [
        Variant::Naive,
        Variant::Abandon,
        Variant::AbandonBounds,
        Variant::AbandonBoundsReuse,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Variant::Naive => "naive",
            Variant::Abandon => "abandon",
            Variant::AbandonBounds => "abandon+bounds",
            Variant::AbandonBoundsReuse => "abandon+bounds+reuse",
        }
    }

    pub fn optimizations(self) -> Optimizations {
        match self {
            Variant::Naive => Optimizations::naive(),
            Variant::Abandon => Optimizations::abandon_only(),
            Variant::AbandonBounds => Optimizations::abandon_and_bounds(),
            Variant::AbandonBoundsReuse => Optimizations::default(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub sizes: Vec<usize>,
    pub lengths: Vec<usize>,
    pub seed: u64,
    pub variants: Vec<Variant>,
    pub relevance: RelevanceConfig,
    pub dtw: DtwConfig,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            sizes: vec![16, 100, 500],
            lengths: vec![20, 40, 60, 80],
            seed: 0,
            variants: Variant::ALL.to_vec(),
            relevance: RelevanceConfig::default(),
            dtw: DtwConfig::unconstrained(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub variant: Variant,
    pub n: usize,
    pub dataset_size: usize,
    pub wall_seconds: f64,
    pub dtw_calls: u64,
    /// Bound prunes plus abandoned evaluations.
    pub prunes: u64,
    pub digest: String,
    pub stats: SearchStats,
}

#[derive(Debug, Clone, Default)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
}

impl BenchReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(REPORT_HEADER);
        out.push('\n');
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{:.6},{},{},{}",
                r.variant.name(),
                r.n,
                r.dataset_size,
                r.wall_seconds,
                r.dtw_calls,
                r.prunes,
                r.digest
            );
        }
        out
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_csv()).map_err(|e| Error::io(path, e))
    }

    pub fn row(&self, variant: Variant, n: usize, size: usize) -> Option<&BenchRow> {
        self.rows
            .iter()
            .find(|r| r.variant == variant && r.n == n && r.dataset_size == size)
    }
}

/// Runs one variant on one generated problem.
pub fn run_one(variant: Variant, size: usize, n: usize, cfg: &BenchConfig) -> Result<BenchRow> {
    let (dataset, query) = bench_problem(size, n, cfg.seed)?;
    let started = Instant::now();
    let (rv, stats) = compute_relevance_with(
        &dataset,
        &query,
        1,
        cfg.dtw,
        cfg.relevance,
        variant.optimizations(),
    )?;
    let wall_seconds = started.elapsed().as_secs_f64();
    Ok(BenchRow {
        variant,
        n,
        dataset_size: size,
        wall_seconds,
        dtw_calls: stats.counters.dtw_calls,
        prunes: stats.counters.bound_prunes + stats.counters.abandons,
        digest: rv.digest(),
        stats,
    })
}

pub fn run_bench(cfg: &BenchConfig) -> Result<BenchReport> {
    let mut report = BenchReport::default();
    for &size in &cfg.sizes {
        for &n in &cfg.lengths {
            let mut reference: Option<String> = None;
            for &variant in &cfg.variants {
                let row = run_one(variant, size, n, cfg)?;
                match &reference {
                    None => reference = Some(row.digest.clone()),
                    Some(d) if *d != row.digest => {
                        return Err(Error::Invariant(format!(
                            "variant {} digest {} differs from {} at n={n}, size={size}",
                            variant.name(),
                            row.digest,
                            d
                        )))
                    }
                    Some(_) => {}
                }
                report.rows.push(row);
            }
        }
    }
    Ok(report)
}
