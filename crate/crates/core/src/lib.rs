//! Explanations for k-nearest-neighbour classification of time series under
//! dynamic time warping.
//!
//! Given a labelled training set and a query, the crate finds the shortest
//! contiguous run of interior points whose removal changes the predicted
//! class ([`find_min_deletion`]), scores each point by how often it takes
//! part in class-changing removals ([`compute_relevance`]), and uses those
//! scores to localise annotated segments ([`detect_segment`]).
//!
//! Indices in the public interface are 1-based for positions within a
//! series and 0-based for positions within a dataset, except where the CLI
//! prints them.

pub mod bench;
pub mod cli;
pub mod detect;
pub mod dtw;
pub mod error;
pub mod io;
pub mod knn;
pub mod relevance;
pub mod search;
pub mod series;
pub mod synth;
pub mod triangle;

pub use detect::{build_detection_dataset, detect_segment, DetectionResult, SegmentAnnotation};
pub use dtw::{dtw, dtw_distance, dtw_resume, Distance, DtwConfig, DtwOutcome};
pub use error::{Error, Result};
pub use knn::{classify, BoundProvider, Classification, Neighbor};
pub use relevance::{compute_relevance, RelevanceConfig, RelevanceVector};
pub use search::{find_min_deletion, search_with_reuse, Optimizations, Outcome, SearchResult, SearchStats};
pub use series::{ClassLabel, Deletion, LabeledDataset, TimeSeries};
pub use triangle::{estimate_triangle_repair, TriangleRepair};
