//! Segment localisation by relevance thresholding.
//!
//! Training series carry an annotated segment. The detection dataset holds
//! each original under `WITH` and the same series with the segment spliced
//! out under `WITHOUT`. For an unobserved series classified `WITH`, the
//! points whose removal pushes it towards `WITHOUT` score high relevance;
//! the longest run strictly above `multiplier * mean(relevance)` is reported.

use crate::dtw::DtwConfig;
use crate::error::{Error, Result};
use crate::knn::{classify, BoundProvider};
use crate::relevance::{compute_relevance, RelevanceConfig, RelevanceVector};
use crate::series::{ClassLabel, Deletion, LabeledDataset, TimeSeries};

pub const WITH: &str = "WITH";
pub const WITHOUT: &str = "WITHOUT";
pub const DEFAULT_THRESHOLD_MULTIPLIER: f64 = 2.0;

/// A 1-based inclusive segment of the series with id `series_id`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SegmentAnnotation {
    pub series_id: String,
    pub start: usize,
    pub end: usize,
}

impl SegmentAnnotation {
    pub fn new(series_id: impl Into<String>, start: usize, end: usize) -> Self {
        SegmentAnnotation {
            series_id: series_id.into(),
            start,
            end,
        }
    }

    pub fn deletion(&self) -> Result<Deletion> {
        Deletion::new(self.start, self.end)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetectionResult {
    /// 1-based inclusive bounds of the detected run.
    pub segment: Option<(usize, usize)>,
    pub threshold: f64,
    pub relevance: RelevanceVector,
}

/// Builds the two-class `WITH` / `WITHOUT` dataset. Originals come first, in
/// input order, followed by their spliced counterparts.
pub fn build_detection_dataset(
    annotated: &[(TimeSeries, SegmentAnnotation)],
) -> Result<LabeledDataset> {
    if annotated.is_empty() {
        return Err(Error::Argument("no annotated series given".into()));
    }
    let with = ClassLabel::new(WITH)?;
    let without = ClassLabel::new(WITHOUT)?;
    let mut originals = Vec::with_capacity(annotated.len());
    let mut spliced = Vec::with_capacity(annotated.len());
    for (series, ann) in annotated {
        let deletion = ann.deletion().map_err(|e| {
            Error::Index(format!("annotation for series {:?}: {e}", ann.series_id))
        })?;
        let cut = series.delete_subsequence(deletion).map_err(|e| {
            Error::Index(format!("annotation for series {:?}: {e}", ann.series_id))
        })?;
        originals.push(series.clone().with_label(with.clone()));
        spliced.push(cut.with_label(without.clone()));
    }
    originals.extend(spliced);
    LabeledDataset::new("detection", originals)
}

/// Longest maximal run of values strictly above `threshold`, earliest on
/// ties, as 1-based inclusive bounds.
pub fn longest_run_above(values: &[f64], threshold: f64) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    let mut i = 0;
    while i < values.len() {
        if values[i] > threshold {
            let start = i;
            while i < values.len() && values[i] > threshold {
                i += 1;
            }
            let longer = best.is_none_or(|(s, e)| i - start > e - s + 1);
            if longer {
                best = Some((start + 1, i));
            }
        } else {
            i += 1;
        }
    }
    best
}

/// Locates the annotated kind of segment in `query`.
pub fn detect_segment(
    dataset: &LabeledDataset,
    query: &TimeSeries,
    cfg: DtwConfig,
    rcfg: RelevanceConfig,
    threshold_multiplier: f64,
) -> Result<DetectionResult> {
    if !(threshold_multiplier > 0.0 && threshold_multiplier.is_finite()) {
        return Err(Error::Argument(format!(
            "threshold multiplier must be positive, got {threshold_multiplier}"
        )));
    }
    let predicted = classify(dataset, query, 1, cfg, &BoundProvider::sound(), false)?.label;
    if predicted.as_str() != WITH {
        return Err(Error::WrongClass {
            label: predicted.as_str().to_string(),
        });
    }
    let relevance = compute_relevance(dataset, query, 1, cfg, rcfg)?;
    let threshold = threshold_multiplier * relevance.mean();
    Ok(DetectionResult {
        segment: longest_run_above(&relevance.values, threshold),
        threshold,
        relevance,
    })
}
