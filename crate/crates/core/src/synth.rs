//! Seeded synthetic series: random walks with and without an injected bump,
//! and flat noisy beats with a rectangular bump for detection trials.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::detect::{build_detection_dataset, SegmentAnnotation};
use crate::error::Result;
use crate::series::{ClassLabel, LabeledDataset, TimeSeries};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random walk from 0 with uniform steps in `[-step, step]`.
pub fn random_walk<R: Rng>(rng: &mut R, n: usize, step: f64) -> Vec<f64> {
    let mut x = 0.0;
    (0..n)
        .map(|_| {
            let v = x;
            x += rng.gen_range(-step..=step);
            v
        })
        .collect()
}

/// Adds a raised-cosine bump of `width` points starting at 0-based `start`.
pub fn add_bump(values: &mut [f64], start: usize, width: usize, amplitude: f64) {
    for k in 0..width.min(values.len().saturating_sub(start)) {
        let phase = (k as f64 + 0.5) / width as f64;
        values[start + k] += amplitude * 0.5 * (1.0 - (2.0 * std::f64::consts::PI * phase).cos());
    }
}

fn bumpy_walk<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    let mut v = random_walk(rng, n, 0.5);
    let width = (n / 8).max(2);
    let start = rng.gen_range(1..=n - width - 1);
    add_bump(&mut v, start, width, 4.0);
    v
}

/// Two-class problem for the scalability benchmark: `size` instances
/// alternating between plain walks (`walk`) and walks with a bump (`bump`),
/// plus a held-out bumpy query.
pub fn bench_problem(size: usize, n: usize, seed: u64) -> Result<(LabeledDataset, TimeSeries)> {
    let mut rng = rng(seed);
    let walk = ClassLabel::new("walk")?;
    let bump = ClassLabel::new("bump")?;
    let mut instances = Vec::with_capacity(size);
    for i in 0..size {
        let s = if i % 2 == 0 {
            TimeSeries::labeled(random_walk(&mut rng, n, 0.5), walk.clone())?
        } else {
            TimeSeries::labeled(bumpy_walk(&mut rng, n), bump.clone())?
        };
        instances.push(s.with_id((i + 1).to_string()));
    }
    let query = TimeSeries::new(bumpy_walk(&mut rng, n))?.with_id("query");
    Ok((LabeledDataset::new(format!("walks-{size}-{n}"), instances)?, query))
}

/// A detection problem built from annotated training beats, plus one
/// held-out beat and the 1-based bounds of its bump.
#[derive(Debug, Clone)]
pub struct BumpTrial {
    pub dataset: LabeledDataset,
    pub query: TimeSeries,
    pub bump: (usize, usize),
}

/// Flat baseline with uniform noise of amplitude `noise`, plus a
/// rectangular bump of height `amplitude` and random width and position.
pub fn bump_beat<R: Rng>(rng: &mut R, n: usize, noise: f64, amplitude: f64) -> (Vec<f64>, (usize, usize)) {
    let width = rng.gen_range(4..=7);
    let start = rng.gen_range(4..=n - width - 3);
    let mut v: Vec<f64> = (0..n).map(|_| rng.gen_range(-noise..=noise)).collect();
    for x in &mut v[start - 1..start - 1 + width] {
        *x += amplitude;
    }
    (v, (start, start + width - 1))
}

pub fn bump_detection_trial(seed: u64, n: usize, train: usize) -> Result<BumpTrial> {
    let mut rng = rng(seed);
    let mut annotated = Vec::with_capacity(train);
    for i in 0..train {
        let (v, (s, e)) = bump_beat(&mut rng, n, 0.1, 1.0);
        let id = (i + 1).to_string();
        annotated.push((TimeSeries::new(v)?.with_id(id.clone()), SegmentAnnotation::new(id, s, e)));
    }
    let (q, bump) = bump_beat(&mut rng, n, 0.1, 1.0);
    Ok(BumpTrial {
        dataset: build_detection_dataset(&annotated)?,
        query: TimeSeries::new(q)?.with_id("query"),
        bump,
    })
}

/// Jaccard overlap of two 1-based inclusive ranges.
pub fn jaccard(a: (usize, usize), b: (usize, usize)) -> f64 {
    let inter = a.1.min(b.1) as i64 - a.0.max(b.0) as i64 + 1;
    if inter <= 0 {
        return 0.0;
    }
    let union = a.1.max(b.1) - a.0.min(b.0) + 1;
    inter as f64 / union as f64
}
