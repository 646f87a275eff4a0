use serde::{Deserialize, Serialize};

use crate::geometry::Pose;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum TrajectoryKind {
    Straight,
    /// Constant curvature (1/m); positive turns left.
    Arc { curvature: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySpec {
    #[serde(flatten)]
    pub kind: TrajectoryKind,
    pub start: Pose,
    /// m/s
    pub speed: f64,
}

impl TrajectorySpec {
    pub fn poses(&self, n_frames: usize, dt: f64) -> Vec<Pose> {
        ego_trajectory(self.kind, &self.start, self.speed, n_frames as f64 * dt, dt)
    }
}

/// Ego poses at `t = 0, dt, 2 dt, ...` for `round(duration / dt)` steps.
pub fn ego_trajectory(kind: TrajectoryKind, start: &Pose, speed: f64, duration: f64, dt: f64) -> Vec<Pose> {
    assert!(dt > 0.0, "dt must be positive");
    let n = (duration / dt).round().max(0.0) as usize;
    let [x0, y0, z0] = start.position;
    let h0 = start.yaw;
    (0..n)
        .map(|i| {
            let s = speed * i as f64 * dt;
            match kind {
                TrajectoryKind::Arc { curvature: k } if k.abs() > 1e-12 => {
                    let h = h0 + k * s;
                    Pose::new(x0 + (h.sin() - h0.sin()) / k, y0 - (h.cos() - h0.cos()) / k, z0, h)
                }
                _ => Pose::new(x0 + s * h0.cos(), y0 + s * h0.sin(), z0, h0),
            }
        })
        .collect()
}
