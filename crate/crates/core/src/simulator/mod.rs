//! Deterministic synthetic worlds, LiDAR-like clouds and a flaky 2D
//! detector, used as the evaluation substrate.
//!
//! Landmarks are trees (ellipsoidal canopy on a cylindrical trunk) and
//! bushes (a single ellipsoid). Every random draw comes from a ChaCha
//! stream keyed by `(seed, frame, stream)`, so a frame is reproducible on
//! its own and rendering can fan out over landmarks without changing the
//! result.

mod detector;
mod render;
mod scenario;
mod trajectory;
mod world;

use thiserror::Error;

pub use detector::{gt_rect, simulate_detector, DetectorOutput, DetectorSpec, DropoutWindow, GroundTruthRect};
pub use render::{render_frame, CameraSpec, PointLabel, RenderedFrame, SensorSpec};
pub use scenario::{slab_indices, split_into_slabs, Scenario, SimFrame};
pub use trajectory::{ego_trajectory, TrajectoryKind, TrajectorySpec};
pub use world::{gen_world, Bounds, Landmark, Trunk, WorldSpec, BASE_CLEARANCE, MIN_SEPARATION};

#[derive(Debug, Error)]
pub enum SimError {
    #[error("could not place {requested} landmarks in the bounds (placed {placed})")]
    PlacementFailure { placed: usize, requested: usize },
    #[error("invalid simulator spec: {0}")]
    InvalidSpec(String),
}

/// Seed for one independent random stream.
pub(crate) fn stream_seed(seed: u64, frame: u64, stream: u64) -> u64 {
    fn splitmix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
    splitmix(splitmix(splitmix(seed) ^ frame) ^ stream)
}

/// Stream ids. Landmark streams are offset by the landmark id.
pub(crate) mod streams {
    pub const WORLD: u64 = 1;
    pub const GROUND: u64 = 2;
    pub const LANDMARK: u64 = 1 << 32;
    pub const DETECTOR: u64 = 2 << 32;
}
