//! Association scores: box-relation sigmoid, ddCRP link weight, elliptical
//! cluster prior and the normalized association posterior.

use super::{idx, StateCovariance, StateVector};
use crate::geometry::{max_signed_distance, Box3D};

/// Sigmoid of the maximum signed distance between the center `ci` and the
/// sides of `bm`: `1 / (1 + exp(-0.75 (phi_max + 1)))`.
pub fn score_relation(ci: [f64; 3], bm: &Box3D) -> f64 {
    let phi = max_signed_distance(ci, bm);
    1.0 / (1.0 + (-0.75 * (phi + 1.0)).exp())
}

/// What a measurement links to in the ddCRP.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LinkTarget<'a> {
    /// Self-link, which opens a new component.
    Itself,
    /// Another measurement (or a component's pseudo-measurement) box.
    Other(&'a Box3D),
}

/// Unnormalized ddCRP weight: `alpha` for a self-link, the relation score
/// otherwise.
pub fn ddcrp_weight(ci: [f64; 3], target: LinkTarget<'_>, alpha: f64) -> f64 {
    match target {
        LinkTarget::Itself => alpha,
        LinkTarget::Other(bm) => score_relation(ci, bm),
    }
}

/// Elliptical x-y prior of a component for a measurement centered at
/// `(mx, my)`. The squared offsets are divided by `a = l + sqrt(P_ll)` and
/// `b = w + sqrt(P_ww)` directly.
pub fn cluster_prior(state: &StateVector, cov: &StateCovariance, mx: f64, my: f64) -> f64 {
    let a = state[idx::L] + cov[(idx::L, idx::L)].max(0.0).sqrt();
    let b = state[idx::W] + cov[(idx::W, idx::W)].max(0.0).sqrt();
    debug_assert!(a > 0.0 && b > 0.0);
    let dx = state[idx::X] - mx;
    let dy = state[idx::Y] - my;
    (-(dx * dx / a + dy * dy / b)).exp()
}

/// Normalizes candidate weights (ddCRP weight times prior) into a
/// distribution. All-zero weights give the uniform distribution.
pub fn association_posterior(weights: &[f64]) -> Vec<f64> {
    let total: f64 = weights.iter().sum();
    if total > 0.0 && total.is_finite() {
        weights.iter().map(|w| w / total).collect()
    } else {
        vec![1.0 / weights.len() as f64; weights.len()]
    }
}
