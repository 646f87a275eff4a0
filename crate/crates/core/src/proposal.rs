//! Class proposals for 3D instances from classified 2D detections.
//!
//! Each instance box is projected into the image, its encasing rectangle is
//! compared against every detection by IoU, and the best detection above
//! the threshold `tau` hands its class to the instance.

use serde::{Deserialize, Serialize};

use crate::classes::ClassScores;
use crate::clustering::Instance3D;
use crate::geometry::{iou_2d, project_box, CameraProjection, Extrinsic, Rect2D};
use crate::par::{self, Execution};

/// A classified image rectangle from the 2D detector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Detection2D {
    pub rect: Rect2D,
    pub class_id: usize,
    pub score: f64,
}

/// On-disk detection record: `{"class", "score", "rect": [x_min, y_min, x_max, y_max]}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectionRecord {
    pub class: usize,
    pub score: f64,
    pub rect: [f64; 4],
}

impl From<&Detection2D> for DetectionRecord {
    fn from(d: &Detection2D) -> Self {
        Self {
            class: d.class_id,
            score: d.score,
            rect: d.rect.to_array(),
        }
    }
}

impl From<&DetectionRecord> for Detection2D {
    fn from(r: &DetectionRecord) -> Self {
        Self {
            rect: Rect2D::new(r.rect[0], r.rect[1], r.rect[2], r.rect[3]),
            class_id: r.class,
            score: r.score,
        }
    }
}

impl Detection2D {
    pub fn is_valid(&self, k: usize) -> bool {
        self.rect.is_valid() && self.class_id < k && (0.0..=1.0).contains(&self.score)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ProposalConfig {
    /// IoU threshold; a match needs IoU strictly above it.
    pub tau: f64,
    /// Number of landmark classes.
    pub num_classes: usize,
    /// When set, projected instance rectangles are clipped to the image.
    pub image_size: Option<[f64; 2]>,
}

impl Default for ProposalConfig {
    fn default() -> Self {
        Self {
            tau: 0.2,
            num_classes: crate::classes::LandmarkClass::COUNT,
            image_size: None,
        }
    }
}

/// Score vector for a matched detection: the detected class gets
/// `0.5 + 0.5 * score`, the rest is spread evenly over the other entries.
pub fn proposal_scores(class_id: usize, score: f64, k: usize) -> ClassScores {
    let main = 0.5 + 0.5 * score.clamp(0.0, 1.0);
    let rest = (1.0 - main) / k as f64;
    let mut w = vec![rest; k + 1];
    w[class_id] = main;
    ClassScores::from_weights(w).expect("proposal weights are positive")
}

/// Best detection for one projected rectangle: max IoU, then higher score,
/// then lower class id. Returns `(detection index, iou)`.
pub fn best_match(rect: &Rect2D, dets: &[Detection2D], tau: f64) -> Option<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for (i, d) in dets.iter().enumerate() {
        let iou = iou_2d(rect, &d.rect);
        if iou <= tau {
            continue;
        }
        let better = match best {
            None => true,
            Some((j, b)) => {
                let o = &dets[j];
                iou > b
                    || (iou == b && d.score > o.score)
                    || (iou == b && d.score == o.score && d.class_id < o.class_id)
            }
        };
        if better {
            best = Some((i, iou));
        }
    }
    best
}

/// Image rectangle of an instance, or `None` if it does not project to a
/// positive-area rectangle.
pub fn instance_rect(
    inst: &Instance3D,
    extrinsic: &Extrinsic,
    projection: &CameraProjection,
    image_size: Option<[f64; 2]>,
) -> Option<Rect2D> {
    let rect = project_box(&inst.bbox, extrinsic, projection).ok()?;
    let rect = match image_size {
        Some([w, h]) => rect.clip(w, h)?,
        None => rect,
    };
    (rect.area() > 0.0).then_some(rect)
}

/// Fills `class_proposal` on every instance. Instances without a match get
/// the uniform prior.
pub fn generate_proposals(
    mut instances: Vec<Instance3D>,
    dets: &[Detection2D],
    extrinsic: &Extrinsic,
    projection: &CameraProjection,
    cfg: &ProposalConfig,
    exec: Execution,
) -> Vec<Instance3D> {
    let k = cfg.num_classes;
    let proposals = par::map(exec, &instances, |inst| {
        instance_rect(inst, extrinsic, projection, cfg.image_size)
            .and_then(|rect| best_match(&rect, dets, cfg.tau))
            .map(|(i, _)| proposal_scores(dets[i].class_id, dets[i].score, k))
            .unwrap_or_else(|| ClassScores::uniform(k))
    });
    for (inst, p) in instances.iter_mut().zip(proposals) {
        inst.class_proposal = Some(p);
    }
    instances
}
