use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::render::SensorSpec;
use super::world::{Landmark, WorldSpec};
use super::{stream_seed, streams, SimError};
use crate::classes::LandmarkClass;
use crate::geometry::{project_box, project_point, Pose, Rect2D};
use crate::proposal::Detection2D;

/// Frames (inclusive) in which a landmark is never detected.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DropoutWindow {
    pub landmark: u64,
    pub first_frame: u64,
    pub last_frame: u64,
}

impl DropoutWindow {
    pub fn covers(&self, landmark: u64, frame: u64) -> bool {
        self.landmark == landmark && (self.first_frame..=self.last_frame).contains(&frame)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DetectorSpec {
    pub detection_prob: f64,
    /// Per-edge Gaussian jitter (px).
    pub jitter_std: f64,
    /// Scores are normal with these parameters, clipped to [0, 1].
    pub score_mean: f64,
    pub score_std: f64,
    pub dropouts: Vec<DropoutWindow>,
}

impl Default for DetectorSpec {
    fn default() -> Self {
        Self {
            detection_prob: 0.7,
            jitter_std: 3.0,
            score_mean: 0.8,
            score_std: 0.1,
            dropouts: Vec::new(),
        }
    }
}

impl DetectorSpec {
    pub fn validate(&self) -> Result<(), SimError> {
        if !(0.0..=1.0).contains(&self.detection_prob) {
            return Err(SimError::InvalidSpec("detection_prob must be in [0, 1]".into()));
        }
        if !(self.jitter_std >= 0.0 && self.score_std >= 0.0) {
            return Err(SimError::InvalidSpec("detector std values must be >= 0".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroundTruthRect {
    pub landmark: u64,
    pub class: LandmarkClass,
    pub rect: Rect2D,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct DetectorOutput {
    pub detections: Vec<Detection2D>,
    /// Image bound of every landmark in view, detected or not.
    pub gt_rects: Vec<GroundTruthRect>,
}

/// Image rectangle of a landmark clipped to the image, or `None` when it is
/// out of range, its center is behind the camera, or it falls outside the
/// image.
pub fn gt_rect(l: &Landmark, sensor_pose: &Pose, sensor: &SensorSpec) -> Option<Rect2D> {
    let b = sensor_pose.box_to_sensor(&l.bbox());
    let range = b.center.iter().map(|v| v * v).sum::<f64>().sqrt();
    if range > sensor.max_range {
        return None;
    }
    let (h, p) = (sensor.camera.extrinsic().ok()?, sensor.camera.projection().ok()?);
    project_point(b.center, &h, &p).ok()?;
    let [w, ht] = sensor.camera.image_size;
    project_box(&b, &h, &p).ok()?.clip(w, ht)
}

/// Simulated 2D detections for one frame. Each landmark in view is
/// detected with `detection_prob` unless a dropout window covers it.
pub fn simulate_detector(
    world: &WorldSpec,
    ego: &Pose,
    detector: &DetectorSpec,
    sensor: &SensorSpec,
    frame: u64,
    seed: u64,
) -> DetectorOutput {
    let sensor_pose = sensor.sensor_pose(ego);
    let [w, h] = sensor.camera.image_size;
    let jitter = (detector.jitter_std > 0.0).then(|| Normal::new(0.0, detector.jitter_std).expect("finite std"));
    let score = (detector.score_std > 0.0).then(|| Normal::new(detector.score_mean, detector.score_std).expect("finite std"));
    let mut out = DetectorOutput::default();
    for l in &world.landmarks {
        let Some(rect) = gt_rect(l, &sensor_pose, sensor) else {
            continue;
        };
        out.gt_rects.push(GroundTruthRect {
            landmark: l.id,
            class: l.class,
            rect,
        });
        let mut rng = ChaCha8Rng::seed_from_u64(stream_seed(seed, frame, streams::DETECTOR + l.id));
        let hit = rng.random::<f64>() < detector.detection_prob;
        if !hit || detector.dropouts.iter().any(|d| d.covers(l.id, frame)) {
            continue;
        }
        let mut e = [0.0; 4];
        if let Some(j) = &jitter {
            for v in &mut e {
                *v = j.sample(&mut rng);
            }
        }
        let (x0, x1) = (rect.x_min + e[0], rect.x_max + e[2]);
        let (y0, y1) = (rect.y_min + e[1], rect.y_max + e[3]);
        let jittered = Rect2D::new(x0.min(x1), y0.min(y1), x0.max(x1), y0.max(y1));
        let Some(jittered) = jittered.clip(w, h).filter(|r| r.area() > 0.0) else {
            continue;
        };
        let s = score
            .as_ref()
            .map_or(detector.score_mean, |n| n.sample(&mut rng))
            .clamp(0.0, 1.0);
        out.detections.push(Detection2D {
            rect: jittered,
            class_id: l.class.id(),
            score: s,
        });
    }
    out
}
