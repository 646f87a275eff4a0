use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::ClassifierError;
use crate::geometry::Point4;

/// Exactly `n_p` points drawn from a component cloud.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledCloud {
    pub points: Vec<Point4>,
    /// Indices into the source cloud, parallel to `points`.
    pub source_indices: Vec<usize>,
    pub source_count: usize,
}

/// Uniform fixed-size sample: without replacement when the cloud has at
/// least `n_p` points, with replacement otherwise. Deterministic in `seed`.
pub fn sample_points(points: &[Point4], n_p: usize, seed: u64) -> Result<SampledCloud, ClassifierError> {
    if points.is_empty() {
        return Err(ClassifierError::EmptyCloud);
    }
    assert!(n_p >= 1, "n_p must be at least 1");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let source_indices: Vec<usize> = if points.len() >= n_p {
        index::sample(&mut rng, points.len(), n_p).into_vec()
    } else {
        (0..n_p).map(|_| rng.random_range(0..points.len())).collect()
    };
    Ok(SampledCloud {
        points: source_indices.iter().map(|&i| points[i]).collect(),
        source_indices,
        source_count: points.len(),
    })
}
