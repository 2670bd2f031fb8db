//! Per-point relevance: `r(i)` is the sum of `1 / |Q|` over every flipping
//! deletion `Q` that contains point `i`.
//!
//! Deletions are evaluated concurrently but folded in canonical
//! (length, start) order, so the vector is bit-identical for any worker
//! count.

use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::dtw::DtwConfig;
use crate::error::{Error, Result};
use crate::search::{short_hex, Explainer, Optimizations, SearchStats};
use crate::series::{Deletion, LabeledDataset, TimeSeries};

/// Approximation knobs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RelevanceConfig {
    /// Only deletions starting at `2, 2 + stride, 2 + 2 * stride, ...`.
    pub stride: usize,
    /// Only deletions of at most this many points.
    pub max_length: Option<usize>,
    pub sound_bounds_only: bool,
}

impl Default for RelevanceConfig {
    fn default() -> Self {
        RelevanceConfig {
            stride: 1,
            max_length: None,
            sound_bounds_only: true,
        }
    }
}

impl RelevanceConfig {
    pub fn with_stride(mut self, stride: usize) -> Self {
        self.stride = stride;
        self
    }

    pub fn with_max_length(mut self, max_length: usize) -> Self {
        self.max_length = Some(max_length);
        self
    }

    fn check(&self, n: usize) -> Result<()> {
        if self.stride < 1 {
            return Err(Error::Argument("stride must be at least 1".into()));
        }
        if let Some(cap) = self.max_length {
            if cap < 1 || cap > n.saturating_sub(2) {
                return Err(Error::Argument(format!(
                    "max length {cap} must lie in 1..={} for a series of length {n}",
                    n.saturating_sub(2)
                )));
            }
        }
        Ok(())
    }

    /// Deletions considered for a length-`n` query, in canonical order.
    pub fn deletions(&self, n: usize) -> Vec<Deletion> {
        let cap = self.max_length.unwrap_or(usize::MAX).min(n.saturating_sub(2));
        let stride = self.stride.max(1);
        (1..=cap)
            .flat_map(|len| {
                (2..=n - len)
                    .step_by(stride)
                    .map(move |start| Deletion::from_start_len(start, len).expect("legal"))
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RelevanceVector {
    pub values: Vec<f64>,
    /// `values / max`, or all zeros when nothing flips.
    pub normalized: Vec<f64>,
    pub stride: usize,
    pub max_length: Option<usize>,
    /// Number of flipping deletions found.
    pub flips: usize,
}

impl RelevanceVector {
    /// Accumulates `1 / |Q|` for each flipping deletion, in the given order.
    pub fn from_flips<'a>(
        n: usize,
        flipping: impl IntoIterator<Item = &'a Deletion>,
        rcfg: RelevanceConfig,
    ) -> Self {
        let mut sums = vec![DoubleDouble::default(); n];
        let mut flips = 0;
        for d in flipping {
            flips += 1;
            let w = DoubleDouble::reciprocal(d.len() as f64);
            for v in &mut sums[d.start() - 1..d.end()] {
                v.add(w);
            }
        }
        let values: Vec<f64> = sums.iter().map(|s| s.hi).collect();
        let max = sums
            .iter()
            .copied()
            .fold(DoubleDouble::default(), |a, b| if b.hi > a.hi { b } else { a });
        let normalized = if max.hi > 0.0 {
            sums.iter().map(|s| s.div(max)).collect()
        } else {
            vec![0.0; n]
        };
        RelevanceVector {
            values,
            normalized,
            stride: rcfg.stride,
            max_length: rcfg.max_length,
            flips,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// 1-based index of the largest value (first on ties).
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (i, v) in self.values.iter().enumerate() {
            if *v > self.values[best] {
                best = i;
            }
        }
        best + 1
    }

    /// Short hex digest of the exact bit patterns of the values.
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        for v in &self.values {
            h.update(v.to_bits().to_le_bytes());
        }
        short_hex(h)
    }
}

/// Unevaluated sum `hi + lo` with `|lo| <= ulp(hi) / 2`. Sums of a few
/// thousand reciprocals stay accurate far beyond `f64`, so `hi` is the
/// correctly rounded total in all but pathological near-tie cases.
#[derive(Debug, Clone, Copy, Default)]
struct DoubleDouble {
    hi: f64,
    lo: f64,
}

impl DoubleDouble {
    fn reciprocal(x: f64) -> Self {
        let hi = 1.0 / x;
        let lo = (-hi).mul_add(x, 1.0) / x;
        DoubleDouble { hi, lo }
    }

    /// Quotient rounded to `f64`.
    fn div(self, d: DoubleDouble) -> f64 {
        let q = self.hi / d.hi;
        let rem = (-q).mul_add(d.hi, self.hi) + self.lo - q * d.lo;
        q + rem / d.hi
    }

    fn add(&mut self, o: DoubleDouble) {
        let s = self.hi + o.hi;
        let bb = s - self.hi;
        let err = (self.hi - (s - bb)) + (o.hi - bb);
        let lo = err + self.lo + o.lo;
        let hi = s + lo;
        self.lo = lo - (hi - s);
        self.hi = hi;
    }
}

/// Relevance with the default optimisations (sound bounds unless
/// `rcfg.sound_bounds_only` is cleared).
pub fn compute_relevance(
    dataset: &LabeledDataset,
    query: &TimeSeries,
    k: usize,
    cfg: DtwConfig,
    rcfg: RelevanceConfig,
) -> Result<RelevanceVector> {
    let opts = Optimizations {
        unsound_triangle: !rcfg.sound_bounds_only,
        ..Optimizations::default()
    };
    compute_relevance_with(dataset, query, k, cfg, rcfg, opts).map(|(rv, _)| rv)
}

pub fn compute_relevance_with(
    dataset: &LabeledDataset,
    query: &TimeSeries,
    k: usize,
    cfg: DtwConfig,
    rcfg: RelevanceConfig,
    opts: Optimizations,
) -> Result<(RelevanceVector, SearchStats)> {
    rcfg.check(query.len())?;
    let explainer = Explainer::new(dataset, query, k, cfg, opts)?;
    let deletions = rcfg.deletions(query.len());
    let evals: Vec<_> = deletions
        .par_iter()
        .map(|&d| explainer.evaluate(d))
        .collect();
    let mut stats = explainer.base_stats();
    let mut flipping = Vec::new();
    for (d, e) in deletions.iter().zip(&evals) {
        stats.counters += e.stats;
        stats.deletions_evaluated += 1;
        if e.verification_failed {
            stats.verification_failures += 1;
        }
        if e.flips {
            flipping.push(d);
        }
    }
    Ok((
        RelevanceVector::from_flips(query.len(), flipping, rcfg),
        stats,
    ))
}
