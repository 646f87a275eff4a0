//! Model-free tree/bush scorer working on relative shape features.

use super::SampledCloud;
use crate::classes::{ClassScores, LandmarkClass};
use crate::geometry::Point4;

/// Constant likelihood mass given to "unknown".
const UNKNOWN_LIKELIHOOD: f64 = 0.05;

/// Shape features of a cloud, invariant to x-y translation and rotation
/// about z.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeometricFeatures {
    /// Vertical extent (m).
    pub height: f64,
    /// Twice the largest horizontal distance from the x-y centroid (m).
    pub footprint: f64,
    /// Share of points in the top third of the vertical extent.
    pub top_fraction: f64,
    pub mean_intensity: f64,
}

impl GeometricFeatures {
    pub fn compute(points: &[Point4]) -> Self {
        let n = points.len().max(1) as f64;
        let (cx, cy) = points
            .iter()
            .fold((0.0, 0.0), |(sx, sy), p| (sx + p.x, sy + p.y));
        let (cx, cy) = (cx / n, cy / n);
        let (mut zmin, mut zmax) = (f64::INFINITY, f64::NEG_INFINITY);
        let mut rmax: f64 = 0.0;
        let mut intensity = 0.0;
        for p in points {
            zmin = zmin.min(p.z);
            zmax = zmax.max(p.z);
            rmax = rmax.max(((p.x - cx).powi(2) + (p.y - cy).powi(2)).sqrt());
            intensity += p.intensity;
        }
        let height = (zmax - zmin).max(0.0);
        let cut = zmin + 2.0 * height / 3.0;
        let top = points.iter().filter(|p| p.z >= cut).count() as f64;
        Self {
            height,
            footprint: 2.0 * rmax,
            top_fraction: top / n,
            mean_intensity: intensity / n,
        }
    }

    pub fn ratio(&self) -> f64 {
        self.height / self.footprint.max(0.05)
    }

    /// Logit of "tree" against "bush".
    pub fn tree_logit(&self) -> f64 {
        1.5 * (self.height - 2.5)
            + 1.0 * (self.ratio() - 1.0)
            + 3.0 * (self.top_fraction - 0.4)
            + 5.0 * (self.mean_intensity - 0.5)
    }
}

/// Scores a sampled cloud as tree or bush, multiplies elementwise by the
/// prior and renormalizes. Priors for other class layouts pass through.
pub fn classify_geometric(cloud: &SampledCloud, prior: &ClassScores) -> ClassScores {
    if prior.k() != LandmarkClass::COUNT || cloud.points.is_empty() {
        return prior.clone();
    }
    let f = GeometricFeatures::compute(&cloud.points);
    let p_tree = 1.0 / (1.0 + (-f.tree_logit()).exp());
    let mut likelihood = vec![0.0; 3];
    likelihood[LandmarkClass::Tree.id()] = (1.0 - UNKNOWN_LIKELIHOOD) * p_tree;
    likelihood[LandmarkClass::Bush.id()] = (1.0 - UNKNOWN_LIKELIHOOD) * (1.0 - p_tree);
    likelihood[2] = UNKNOWN_LIKELIHOOD;
    let likelihood = ClassScores::from_weights(likelihood).expect("positive likelihood");
    prior.multiply(&likelihood).unwrap_or_else(|_| prior.clone())
}
