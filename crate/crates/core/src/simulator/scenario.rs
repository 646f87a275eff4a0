use std::path::Path;

use serde::{Deserialize, Serialize};

use super::detector::{simulate_detector, DetectorOutput, DetectorSpec};
use super::render::{render_frame, CameraSpec, RenderedFrame, SensorSpec};
use super::trajectory::{TrajectoryKind, TrajectorySpec};
use super::world::{gen_world, Bounds, WorldSpec};
use super::{stream_seed, SimError};
use crate::eval::GroundTruthBox;
use crate::geometry::{Point4, Pose};
use crate::par::Execution;

/// Everything needed to regenerate a sequence of frames.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub world: WorldSpec,
    #[serde(default)]
    pub sensor: SensorSpec,
    #[serde(default)]
    pub detector: DetectorSpec,
    pub trajectory: TrajectorySpec,
    pub n_frames: usize,
    pub dt: f64,
    /// When set, clustering is bypassed and every landmark's points are
    /// emitted as this many vertical slabs.
    #[serde(default)]
    pub oversegment: Option<usize>,
}

/// One generated frame.
#[derive(Debug, Clone, PartialEq)]
pub struct SimFrame {
    pub index: u64,
    pub ego: Pose,
    pub sensor_pose: Pose,
    pub rendered: RenderedFrame,
    pub detector: DetectorOutput,
    /// World-frame boxes of the landmarks within sensor range.
    pub ground_truth: Vec<GroundTruthBox>,
}

impl Scenario {
    /// Ten landmarks (6 trees, 4 bushes) on the left of a 20 m straight
    /// drive, camera facing left, 100 frames at 10 Hz.
    pub fn benchmark(seed: u64) -> Result<Self, SimError> {
        let world = gen_world(
            seed,
            6,
            4,
            Bounds {
                min: [-20.0, 5.0],
                max: [20.0, 35.0],
            },
        )?;
        Ok(Self {
            world,
            sensor: SensorSpec {
                camera: CameraSpec::pinhole_facing(std::f64::consts::FRAC_PI_2),
                ..Default::default()
            },
            detector: DetectorSpec::default(),
            trajectory: TrajectorySpec {
                kind: TrajectoryKind::Straight,
                start: Pose::new(-10.0, 0.0, 0.0, 0.0),
                speed: 2.0,
            },
            n_frames: 100,
            dt: 0.1,
            oversegment: None,
        })
    }

    pub fn validate(&self) -> Result<(), SimError> {
        self.world.validate()?;
        self.sensor.validate()?;
        self.detector.validate()?;
        if self.dt.is_nan() || self.dt <= 0.0 {
            return Err(SimError::InvalidSpec("dt must be positive".into()));
        }
        if self.oversegment == Some(0) {
            return Err(SimError::InvalidSpec("oversegment needs at least one slab".into()));
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self, SimError> {
        let s: Self = serde_json::from_str(text).map_err(|e| SimError::InvalidSpec(e.to_string()))?;
        s.validate()?;
        Ok(s)
    }

    pub fn load(path: &Path) -> Result<Self, SimError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| SimError::InvalidSpec(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn ego_poses(&self) -> Vec<Pose> {
        self.trajectory.poses(self.n_frames, self.dt)
    }

    pub fn ground_truth(&self, frame: u64, sensor_pose: &Pose) -> Vec<GroundTruthBox> {
        self.world
            .landmarks
            .iter()
            .filter(|l| {
                let c = sensor_pose.to_sensor(l.bbox().center);
                (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt() <= self.sensor.max_range
            })
            .map(|l| GroundTruthBox {
                frame,
                landmark: l.id,
                class: l.class,
                bbox: l.bbox(),
            })
            .collect()
    }

    /// Generates frame `index` at `ego`. Output depends only on the world
    /// seed, the index and the pose.
    pub fn frame_at(&self, index: u64, ego: Pose, exec: Execution) -> SimFrame {
        let seed = stream_seed(self.world.seed, index, 0);
        let sensor_pose = self.sensor.sensor_pose(&ego);
        SimFrame {
            index,
            ego,
            sensor_pose,
            rendered: render_frame(&self.world, &ego, &self.sensor, seed, exec),
            detector: simulate_detector(&self.world, &ego, &self.detector, &self.sensor, index, self.world.seed),
            ground_truth: self.ground_truth(index, &sensor_pose),
        }
    }
}

/// Splits points into `j` equal-width slabs along x. Empty slabs are
/// dropped.
pub fn split_into_slabs(points: &[Point4], j: usize) -> Vec<Vec<Point4>> {
    slab_indices(points, j)
        .into_iter()
        .map(|idx| idx.into_iter().map(|i| points[i]).collect())
        .collect()
}

/// Index form of [`split_into_slabs`].
pub fn slab_indices(points: &[Point4], j: usize) -> Vec<Vec<usize>> {
    if points.is_empty() || j == 0 {
        return Vec::new();
    }
    let (lo, hi) = points
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| (lo.min(p.x), hi.max(p.x)));
    let width = (hi - lo) / j as f64;
    let mut slabs = vec![Vec::new(); j];
    for (i, p) in points.iter().enumerate() {
        let k = if width > 0.0 { ((p.x - lo) / width) as usize } else { 0 };
        slabs[k.min(j - 1)].push(i);
    }
    slabs.retain(|s| !s.is_empty());
    slabs
}
