//! Greedy Dirichlet Process Filter.
//!
//! Every component of the Dirichlet-process mixture is one tracked target
//! with a 9-D state `(x, y, z, vx, vy, omega, l, w, h)`, a covariance, an
//! existence probability and fused class scores. Each frame the filter
//! predicts all components with a coordinated-turn model, greedily assigns
//! each measurement to the component (or a new one) with the highest
//! ddCRP-times-cluster-prior posterior, then runs one Kalman update per hit
//! component on the union of its measurements.

mod filter;
mod motion;
mod scoring;

use nalgebra::{SMatrix, SVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classes::ClassScores;
use crate::geometry::{Box3D, Point4};

pub use filter::{
    associate_greedy, fuse_class, update_existence, AssociationRecord, FrameResult, Gdpf, Link,
    TrackedComponent,
};
pub use motion::{init_component, predict, process_noise, transition_jacobian, update};
pub use scoring::{
    association_posterior, cluster_prior, ddcrp_weight, score_relation, LinkTarget,
};

pub const STATE_DIM: usize = 9;
pub const MEAS_DIM: usize = 6;

pub type StateVector = SVector<f64, STATE_DIM>;
pub type StateCovariance = SMatrix<f64, STATE_DIM, STATE_DIM>;

/// Indices into the state vector.
pub mod idx {
    pub const X: usize = 0;
    pub const Y: usize = 1;
    pub const Z: usize = 2;
    pub const VX: usize = 3;
    pub const VY: usize = 4;
    pub const OMEGA: usize = 5;
    pub const L: usize = 6;
    pub const W: usize = 7;
    pub const H: usize = 8;
    /// State entries observed by a box measurement, in measurement order.
    pub const MEASURED: [usize; 6] = [X, Y, Z, L, W, H];
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GdpfError {
    #[error("innovation covariance is not positive definite for component {0}")]
    NonPositiveInnovationCovariance(u64),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

/// Filter tuning. Noise values are standard deviations unless noted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GdpfConfig {
    /// ddCRP concentration; the weight of opening a new component.
    pub alpha: f64,
    /// Process noise spectral densities (variance per second) for
    /// position, velocity, turn rate and dimensions.
    pub q_position: f64,
    pub q_velocity: f64,
    pub q_turn_rate: f64,
    pub q_dimension: f64,
    pub meas_std_position: f64,
    pub meas_std_dimension: f64,
    /// Initial covariance is the measurement variance times this factor.
    pub init_cov_inflation: f64,
    pub init_std_velocity: f64,
    pub init_std_turn_rate: f64,
    pub existence_init: f64,
    pub existence_hit: f64,
    pub existence_miss_decay: f64,
    pub existence_prune: f64,
    pub max_accumulated_points: usize,
    /// Below this |omega| the constant-velocity limit is used.
    pub omega_linear_threshold: f64,
    /// EMA weight for class-score fusion.
    pub class_fusion_weight: f64,
    pub min_dimension: f64,
    /// Seeds the per-component point reservoirs.
    pub seed: u64,
}

impl Default for GdpfConfig {
    fn default() -> Self {
        Self {
            alpha: 0.1,
            q_position: 1e-5,
            q_velocity: 1e-6,
            q_turn_rate: 1e-6,
            q_dimension: 1e-4,
            meas_std_position: 0.2,
            meas_std_dimension: 0.3,
            init_cov_inflation: 4.0,
            init_std_velocity: 0.005,
            init_std_turn_rate: 0.01,
            existence_init: 0.3,
            existence_hit: 0.25,
            existence_miss_decay: 0.9,
            existence_prune: 0.05,
            max_accumulated_points: 12_000,
            omega_linear_threshold: 1e-6,
            class_fusion_weight: 0.3,
            min_dimension: 0.05,
            seed: 0,
        }
    }
}

impl GdpfConfig {
    pub fn validate(&self) -> Result<(), GdpfError> {
        let positive = [
            ("q_position", self.q_position),
            ("q_velocity", self.q_velocity),
            ("q_turn_rate", self.q_turn_rate),
            ("q_dimension", self.q_dimension),
            ("meas_std_position", self.meas_std_position),
            ("meas_std_dimension", self.meas_std_dimension),
            ("init_cov_inflation", self.init_cov_inflation),
            ("init_std_velocity", self.init_std_velocity),
            ("init_std_turn_rate", self.init_std_turn_rate),
            ("min_dimension", self.min_dimension),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(GdpfError::InvalidConfig(format!("{name} must be > 0, got {v}")));
            }
        }
        if !(self.alpha.is_finite() && self.alpha >= 0.0) {
            return Err(GdpfError::InvalidConfig(format!("alpha must be >= 0, got {}", self.alpha)));
        }
        if !(self.existence_prune > 0.0 && self.existence_prune < 1.0) {
            return Err(GdpfError::InvalidConfig("existence_prune must be in (0, 1)".into()));
        }
        for (name, v) in [
            ("existence_init", self.existence_init),
            ("existence_hit", self.existence_hit),
            ("existence_miss_decay", self.existence_miss_decay),
            ("class_fusion_weight", self.class_fusion_weight),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(GdpfError::InvalidConfig(format!("{name} must be in [0, 1]")));
            }
        }
        if self.max_accumulated_points == 0 {
            return Err(GdpfError::InvalidConfig("max_accumulated_points must be >= 1".into()));
        }
        Ok(())
    }
}

/// One box measurement handed to the tracker.
#[derive(Debug, Clone, PartialEq)]
pub struct Measurement {
    pub bbox: Box3D,
    pub class_proposal: ClassScores,
    pub points: Vec<Point4>,
    pub frame_index: u64,
    pub index_in_frame: usize,
}

impl Measurement {
    pub fn center(&self) -> [f64; 3] {
        self.bbox.center
    }

    /// Union box, concatenated points and point-weighted class proposals.
    pub fn merge(parts: &[&Measurement]) -> Measurement {
        let first = parts[0];
        let mut bbox = first.bbox;
        let mut points = Vec::with_capacity(parts.iter().map(|m| m.points.len()).sum());
        let k1 = first.class_proposal.len();
        let mut weights = vec![0.0; k1];
        for m in parts {
            bbox = bbox.union(&m.bbox);
            points.extend_from_slice(&m.points);
            let w = m.points.len().max(1) as f64;
            for (acc, s) in weights.iter_mut().zip(m.class_proposal.as_slice()) {
                *acc += w * s;
            }
        }
        Measurement {
            bbox,
            class_proposal: ClassScores::from_weights(weights)
                .unwrap_or_else(|_| first.class_proposal.clone()),
            points,
            frame_index: first.frame_index,
            index_in_frame: first.index_in_frame,
        }
    }
}

/// The 9-D dynamical state of a component.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DynamicState(pub StateVector);

impl DynamicState {
    pub fn position(&self) -> [f64; 3] {
        [self.0[idx::X], self.0[idx::Y], self.0[idx::Z]]
    }

    pub fn velocity(&self) -> [f64; 2] {
        [self.0[idx::VX], self.0[idx::VY]]
    }

    pub fn turn_rate(&self) -> f64 {
        self.0[idx::OMEGA]
    }

    pub fn dims(&self) -> [f64; 3] {
        [self.0[idx::L], self.0[idx::W], self.0[idx::H]]
    }

    /// Box implied by position and dimensions.
    pub fn bbox(&self) -> Box3D {
        Box3D {
            center: self.position(),
            dims: self.dims(),
        }
    }

    pub fn to_array(&self) -> [f64; STATE_DIM] {
        self.0.into()
    }
}

/// One tracked target.
#[derive(Debug, Clone)]
pub struct Component {
    pub id: u64,
    pub state: DynamicState,
    pub cov: StateCovariance,
    pub existence: f64,
    pub class_scores: ClassScores,
    /// Reservoir sample of all points associated so far.
    pub accumulated_points: Vec<Point4>,
    /// Total points ever offered to the reservoir.
    pub points_seen: u64,
    pub last_associated_box: Option<Box3D>,
    pub frames_since_hit: u32,
    reservoir_rng: ChaCha8Rng,
}

impl Component {
    pub(crate) fn new(
        id: u64,
        state: DynamicState,
        cov: StateCovariance,
        existence: f64,
        class_scores: ClassScores,
        seed: u64,
    ) -> Self {
        Self {
            id,
            state,
            cov,
            existence,
            class_scores,
            accumulated_points: Vec::new(),
            points_seen: 0,
            last_associated_box: None,
            frames_since_hit: 0,
            reservoir_rng: ChaCha8Rng::seed_from_u64(seed ^ id.wrapping_mul(0x9E37_79B9_7F4A_7C15)),
        }
    }

    pub fn bbox(&self) -> Box3D {
        self.state.bbox()
    }

    /// Adds points with reservoir sampling, keeping at most `cap`.
    pub fn accumulate(&mut self, points: &[Point4], cap: usize) {
        use rand::Rng;
        for p in points {
            self.points_seen += 1;
            if self.accumulated_points.len() < cap {
                self.accumulated_points.push(*p);
            } else {
                let j = self.reservoir_rng.random_range(0..self.points_seen);
                if (j as usize) < cap {
                    self.accumulated_points[j as usize] = *p;
                }
            }
        }
    }
}
