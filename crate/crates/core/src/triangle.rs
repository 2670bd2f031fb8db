//! Relaxed triangle inequality for DTW.
//!
//! DTW is not a metric. A stretch constant `c >= 1` with
//! `d(x, z) <= c * (d(x, y) + d(y, z))` on the training set gives, for a
//! query `Q` with known distance to an anchor `A`,
//! `d(Q, S) >= d(Q, A) / c - d(A, S)`. The constant is estimated on training
//! triples only, so the bound is heuristic for unseen queries.

use rand::seq::index::sample as sample_indices;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::dtw::{self, DtwConfig};
use crate::error::{Error, Result};
use crate::series::LabeledDataset;

#[derive(Debug, Clone)]
pub struct TriangleRepair {
    stretch: f64,
    size: usize,
    distances: Vec<f64>,
    exhaustive: bool,
}

impl TriangleRepair {
    /// Builds the repair from an explicit symmetric distance matrix
    /// (row-major, `size x size`).
    pub fn from_distances(size: usize, distances: Vec<f64>, sample: Option<usize>, seed: u64) -> Result<Self> {
        if size < 3 {
            return Err(Error::Argument(format!(
                "triangle repair needs at least 3 instances, got {size}"
            )));
        }
        assert_eq!(distances.len(), size * size);
        let ratio = |x: usize, y: usize, z: usize| {
            let num = distances[x * size + z];
            let den = distances[x * size + y] + distances[y * size + z];
            if den > 0.0 {
                num / den
            } else if num > 0.0 {
                f64::INFINITY
            } else {
                0.0
            }
        };
        let total = size * (size - 1) * (size - 2);
        let (stretch, exhaustive) = match sample {
            Some(count) if count < total => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let mut c: f64 = 1.0;
                for flat in sample_indices(&mut rng, size * size * size, count.min(size * size * size)) {
                    let (x, y, z) = (flat / (size * size), (flat / size) % size, flat % size);
                    if x != y && y != z && x != z {
                        c = c.max(ratio(x, y, z));
                    }
                }
                (c, false)
            }
            _ => {
                let mut c: f64 = 1.0;
                for x in 0..size {
                    for y in 0..size {
                        for z in 0..size {
                            if x != y && y != z && x != z {
                                c = c.max(ratio(x, y, z));
                            }
                        }
                    }
                }
                (c, true)
            }
        };
        Ok(TriangleRepair {
            stretch,
            size,
            distances,
            exhaustive,
        })
    }

    pub fn stretch(&self) -> f64 {
        self.stretch
    }

    /// True when every ordered training triple was examined.
    pub fn is_exhaustive(&self) -> bool {
        self.exhaustive
    }

    pub fn distance(&self, a: usize, b: usize) -> f64 {
        self.distances[a * self.size + b]
    }

    /// Best bound on `d(Q, candidate)` over anchors with known `d(Q, anchor)`.
    pub fn lower_bound(&self, anchors: &[(usize, f64)], candidate: usize) -> f64 {
        anchors
            .iter()
            .map(|&(a, dq)| dq / self.stretch - self.distance(a, candidate))
            .fold(0.0, f64::max)
    }
}

/// Computes all pairwise training distances and the stretch constant,
/// either exhaustively (`sample = None`) or over `sample` seeded random
/// ordered triples.
pub fn estimate_triangle_repair(
    dataset: &LabeledDataset,
    cfg: DtwConfig,
    sample: Option<usize>,
    seed: u64,
) -> Result<TriangleRepair> {
    let size = dataset.len();
    if size < 3 {
        return Err(Error::Argument(format!(
            "triangle repair needs at least 3 instances, got {size}"
        )));
    }
    for a in dataset.instances() {
        for b in dataset.instances() {
            cfg.check(a.len(), b.len())?;
        }
    }
    let upper: Vec<(usize, usize, f64)> = (0..size)
        .into_par_iter()
        .flat_map_iter(|i| {
            let inst = dataset.instances();
            (i + 1..size).map(move |j| (i, j, dtw::dtw(inst[i].values(), inst[j].values(), cfg)))
        })
        .collect();
    let mut distances = vec![0.0; size * size];
    for (i, j, d) in upper {
        distances[i * size + j] = d;
        distances[j * size + i] = d;
    }
    TriangleRepair::from_distances(size, distances, sample, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::{ClassLabel, TimeSeries};

    #[test]
    fn constant_series_satisfy_the_triangle() {
        let inst = |v: f64, l: &str| {
            TimeSeries::labeled(vec![v, v], ClassLabel::new(l).unwrap()).unwrap()
        };
        let ds = LabeledDataset::new("c", vec![inst(0.0, "A"), inst(1.0, "B"), inst(3.0, "A")])
            .unwrap();
        let r = estimate_triangle_repair(&ds, DtwConfig::unconstrained(), None, 0).unwrap();
        assert_eq!(r.distance(0, 1), 2.0);
        assert_eq!(r.distance(1, 2), 4.0);
        assert_eq!(r.distance(0, 2), 6.0);
        assert_eq!(r.stretch(), 1.0);
        assert!(r.is_exhaustive());
    }

    #[test]
    fn needs_three_instances() {
        let a = TimeSeries::labeled(vec![0.0], ClassLabel::new("A").unwrap()).unwrap();
        let b = TimeSeries::labeled(vec![1.0], ClassLabel::new("B").unwrap()).unwrap();
        let ds = LabeledDataset::new("c", vec![a, b]).unwrap();
        assert!(matches!(
            estimate_triangle_repair(&ds, DtwConfig::unconstrained(), None, 0),
            Err(Error::Argument(_))
        ));
    }

    #[test]
    fn violated_triangle_raises_stretch() {
        // d(0,2) = 10 while d(0,1) + d(1,2) = 2.
        let d = vec![0.0, 1.0, 10.0, 1.0, 0.0, 1.0, 10.0, 1.0, 0.0];
        let r = TriangleRepair::from_distances(3, d, None, 0).unwrap();
        assert_eq!(r.stretch(), 5.0);
        // Anchor 0 at distance 10 from Q: d(Q, 2) >= 10 / 5 - 10 < 0, clamped to 0.
        assert_eq!(r.lower_bound(&[(0, 10.0)], 2), 0.0);
        assert_eq!(r.lower_bound(&[(0, 10.0)], 1), 1.0);
    }
}
