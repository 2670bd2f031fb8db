//! Time series, labels, datasets and the elementary transforms applied to
//! queries before and during explanation.
//!
//! Every index that crosses the public API is 1-based. Values are stored in
//! ordinary 0-based vectors internally.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// An opaque class token. Equality is exact token equality.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ClassLabel(Arc<str>);

impl ClassLabel {
    pub fn new(token: impl AsRef<str>) -> Result<Self> {
        let token = token.as_ref();
        if token.is_empty() {
            return Err(Error::Argument("class label must be non-empty".into()));
        }
        Ok(ClassLabel(Arc::from(token)))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A finite, non-empty, ordered sequence of real measurements.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    id: String,
    values: Vec<f64>,
    label: Option<ClassLabel>,
}

impl TimeSeries {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Argument("time series must contain at least one value".into()));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Argument(format!(
                "value at index {} is not finite",
                pos + 1
            )));
        }
        Ok(TimeSeries {
            id: String::new(),
            values,
            label: None,
        })
    }

    pub fn labeled(values: Vec<f64>, label: ClassLabel) -> Result<Self> {
        Ok(Self::new(values)?.with_label(label))
    }

    pub fn with_id(mut self, id: impl Into<String>) -> Self {
        self.id = id.into();
        self
    }

    pub fn with_label(mut self, label: ClassLabel) -> Self {
        self.label = Some(label);
        self
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn label(&self) -> Option<&ClassLabel> {
        self.label.as_ref()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// Always false; kept for API symmetry with slices.
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// 1-based accessor.
    pub fn get(&self, index: usize) -> Option<f64> {
        index.checked_sub(1).and_then(|i| self.values.get(i).copied())
    }

    /// Removes the points covered by `deletion`, keeping id and label.
    pub fn delete_subsequence(&self, deletion: Deletion) -> Result<TimeSeries> {
        deletion.check(self.len())?;
        Ok(TimeSeries {
            id: self.id.clone(),
            values: deletion.apply(&self.values),
            label: self.label.clone(),
        })
    }

    pub fn reverse(&self) -> TimeSeries {
        let mut values = self.values.clone();
        values.reverse();
        TimeSeries {
            id: self.id.clone(),
            values,
            label: self.label.clone(),
        }
    }

    /// Population z-normalisation. Constant series map to all zeros.
    pub fn z_normalize(&self) -> TimeSeries {
        let n = self.values.len() as f64;
        let mean = self.values.iter().sum::<f64>() / n;
        let var = self.values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        let sd = var.sqrt();
        let values = if sd <= f64::EPSILON * mean.abs().max(1.0) {
            vec![0.0; self.values.len()]
        } else {
            self.values.iter().map(|v| (v - mean) / sd).collect()
        };
        TimeSeries {
            id: self.id.clone(),
            values,
            label: self.label.clone(),
        }
    }

    /// Keeps every `factor`-th point starting from the first.
    pub fn downsample(&self, factor: usize) -> Result<TimeSeries> {
        if factor < 1 {
            return Err(Error::Argument("down-sampling factor must be at least 1".into()));
        }
        Ok(TimeSeries {
            id: self.id.clone(),
            values: self.values.iter().copied().step_by(factor).collect(),
            label: self.label.clone(),
        })
    }
}

/// A contiguous, 1-based, inclusive index range `[start, end]` removed from a
/// query. End-points of the query are never removable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Deletion {
    start: usize,
    end: usize,
}

impl Deletion {
    pub fn new(start: usize, end: usize) -> Result<Self> {
        if start < 2 || end < start {
            return Err(Error::Index(format!(
                "deletion [{start}, {end}] must satisfy 2 <= start <= end"
            )));
        }
        Ok(Deletion { start, end })
    }

    /// Deletion of `length` points beginning at `start`.
    pub fn from_start_len(start: usize, length: usize) -> Result<Self> {
        if length == 0 {
            return Err(Error::Index("deletion length must be at least 1".into()));
        }
        Self::new(start, start + length - 1)
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn end(&self) -> usize {
        self.end
    }

    pub fn len(&self) -> usize {
        self.end - self.start + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, index: usize) -> bool {
        (self.start..=self.end).contains(&index)
    }

    /// Validates the deletion against a series of length `n`.
    pub fn check(&self, n: usize) -> Result<()> {
        if n < 3 {
            return Err(Error::Index(format!(
                "series of length {n} has no removable interior points"
            )));
        }
        if self.end > n - 1 {
            return Err(Error::Index(format!(
                "deletion [{}, {}] touches or exceeds end-point {n}",
                self.start, self.end
            )));
        }
        Ok(())
    }

    /// The same points seen from the end of a reversed series of length `n`.
    pub fn reflect(&self, n: usize) -> Deletion {
        Deletion {
            start: n + 1 - self.end,
            end: n + 1 - self.start,
        }
    }

    pub(crate) fn apply(&self, values: &[f64]) -> Vec<f64> {
        let mut out = Vec::with_capacity(values.len() - self.len());
        out.extend_from_slice(&values[..self.start - 1]);
        out.extend_from_slice(&values[self.end..]);
        out
    }

    /// Every legal deletion of a length-`n` series in canonical order:
    /// length ascending, then start ascending.
    pub fn enumerate(n: usize) -> impl Iterator<Item = Deletion> {
        let max_len = n.saturating_sub(2);
        (1..=max_len).flat_map(move |len| {
            (2..=n - len).map(move |start| Deletion {
                start,
                end: start + len - 1,
            })
        })
    }
}

impl fmt::Display for Deletion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.start, self.end)
    }
}

/// An immutable, ordered set of labelled training instances. Instance order
/// is the tie-breaking order for nearest-neighbour search.
#[derive(Debug, Clone)]
pub struct LabeledDataset {
    name: String,
    instances: Vec<TimeSeries>,
    labels: Vec<ClassLabel>,
}

impl LabeledDataset {
    pub fn new(name: impl Into<String>, instances: Vec<TimeSeries>) -> Result<Self> {
        let mut labels = Vec::with_capacity(instances.len());
        for (i, s) in instances.iter().enumerate() {
            match s.label() {
                Some(l) => labels.push(l.clone()),
                None => {
                    return Err(Error::Argument(format!("instance {} has no label", i + 1)))
                }
            }
        }
        let distinct: BTreeSet<&ClassLabel> = labels.iter().collect();
        if distinct.len() < 2 {
            return Err(Error::Argument(format!(
                "dataset needs at least 2 distinct labels, found {}",
                distinct.len()
            )));
        }
        Ok(LabeledDataset {
            name: name.into(),
            instances,
            labels,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn len(&self) -> usize {
        self.instances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instances.is_empty()
    }

    pub fn instances(&self) -> &[TimeSeries] {
        &self.instances
    }

    pub fn instance(&self, index: usize) -> &TimeSeries {
        &self.instances[index]
    }

    /// Label of the instance at 0-based position `index`.
    pub fn label(&self, index: usize) -> &ClassLabel {
        &self.labels[index]
    }

    pub fn distinct_labels(&self) -> Vec<ClassLabel> {
        let set: BTreeSet<&ClassLabel> = self.labels.iter().collect();
        set.into_iter().cloned().collect()
    }

    /// The dataset without the instance at `index`, for leave-one-out runs.
    pub fn without(&self, index: usize) -> Result<LabeledDataset> {
        let instances = self
            .instances
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != index)
            .map(|(_, s)| s.clone())
            .collect();
        LabeledDataset::new(self.name.clone(), instances)
    }
}
