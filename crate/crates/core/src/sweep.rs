//! Deterministic point sampling and the per-point sweep.
//!
//! With the `parallel` feature (default) points are evaluated on the rayon
//! pool; without it they run sequentially. Both paths return results in
//! point order, so reports are identical either way.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::classify::{aggregate, classify_point, ClassificationReport, ClassifyConfig, PointClassification};
use crate::dsl::MetricField;
use crate::engine::{curvature_pack, CurvaturePack};
use crate::error::{GeometryError, Result};

const PRIMES: [u32; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

fn radical_inverse(mut i: u64, base: u32) -> f64 {
    let b = base as u64;
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut r = 0.0;
    while i > 0 {
        r += (i % b) as f64 * f;
        i /= b;
        f *= inv;
    }
    r
}

/// `count` Halton points over the box `domain`, with a seeded
/// Cranley–Patterson rotation.
pub fn sample_points(domain: &[(f64, f64)], count: usize, seed: u64) -> Vec<Vec<f64>> {
    assert!(domain.len() <= PRIMES.len(), "at most {} coordinates", PRIMES.len());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shift: Vec<f64> = domain.iter().map(|_| rng.gen::<f64>()).collect();
    (1..=count as u64)
        .map(|i| {
            domain
                .iter()
                .zip(PRIMES)
                .zip(&shift)
                .map(|(((lo, hi), p), s)| {
                    let u = (radical_inverse(i, p) + s).fract();
                    lo + u * (hi - lo)
                })
                .collect()
        })
        .collect()
}

/// Apply `f` to every point on the current thread.
pub fn map_points_sequential<T, F>(points: &[Vec<f64>], f: F) -> Result<Vec<T>>
where
    F: Fn(&[f64]) -> Result<T>,
{
    points.iter().map(|p| f(p)).collect()
}

/// Apply `f` to every point on the rayon pool.
#[cfg(feature = "parallel")]
pub fn map_points_parallel<T, F>(points: &[Vec<f64>], f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&[f64]) -> Result<T> + Sync + Send,
{
    use rayon::prelude::*;
    points.par_iter().map(|p| f(p)).collect()
}

/// Apply `f` to every point, in parallel when the feature is on.
pub fn map_points<T, F>(points: &[Vec<f64>], f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&[f64]) -> Result<T> + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        map_points_parallel(points, f)
    }
    #[cfg(not(feature = "parallel"))]
    {
        map_points_sequential(points, f)
    }
}

pub fn curvature_packs(m: &MetricField, points: &[Vec<f64>]) -> Result<Vec<CurvaturePack>> {
    map_points(points, |p| curvature_pack(m, p))
}

pub fn classify_points(m: &MetricField, points: &[Vec<f64>], cfg: &ClassifyConfig) -> Result<Vec<PointClassification>> {
    map_points(points, |p| classify_point(&curvature_pack(m, p)?, cfg))
}

/// Classify `m` at explicit points.
pub fn classify_at(m: &MetricField, points: &[Vec<f64>], cfg: &ClassifyConfig) -> Result<ClassificationReport> {
    if points.is_empty() {
        return Err(GeometryError::EmptySample);
    }
    aggregate(classify_points(m, points, cfg)?, cfg)
}

/// Classify `m` at `samples` points drawn from its chart domain.
pub fn classify_metric(m: &MetricField, samples: usize, cfg: &ClassifyConfig) -> Result<ClassificationReport> {
    classify_at(m, &sample_points(m.domain(), samples, cfg.seed), cfg)
}
