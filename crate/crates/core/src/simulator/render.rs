use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::world::{Landmark, WorldSpec};
use super::{stream_seed, streams, SimError};
use crate::classes::LandmarkClass;
use crate::geometry::{CameraProjection, Extrinsic, Point4, PointCloud, Pose};
use crate::par::{self, Execution};

/// Pinhole camera rigidly attached to the LiDAR.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CameraSpec {
    /// Row-major 3x4 projection matrix.
    pub projection: Vec<f64>,
    /// Row-major 4x4 LiDAR-to-camera transform.
    pub extrinsic: Vec<f64>,
    /// Image width and height in pixels.
    pub image_size: [f64; 2],
}

impl CameraSpec {
    /// 1280x720 pinhole (f = 700 px) looking horizontally along sensor
    /// yaw `yaw` (0 = forward along +x, pi/2 = left along +y).
    pub fn pinhole_facing(yaw: f64) -> Self {
        let (s, c) = yaw.sin_cos();
        // camera axes in sensor coordinates: x right, y down, z along view
        let right = [s, -c, 0.0];
        let down = [0.0, 0.0, -1.0];
        let view = [c, s, 0.0];
        let mut extrinsic = vec![0.0; 16];
        for (r, axis) in [right, down, view].iter().enumerate() {
            extrinsic[4 * r..4 * r + 3].copy_from_slice(axis);
        }
        extrinsic[15] = 1.0;
        Self {
            projection: CameraProjection::pinhole(700.0, 700.0, 640.0, 360.0).to_row_vec(),
            extrinsic,
            image_size: [1280.0, 720.0],
        }
    }

    pub fn projection(&self) -> Result<CameraProjection, SimError> {
        CameraProjection::from_row_slice(&self.projection).map_err(|e| SimError::InvalidSpec(e.to_string()))
    }

    pub fn extrinsic(&self) -> Result<Extrinsic, SimError> {
        Extrinsic::from_row_slice(&self.extrinsic).map_err(|e| SimError::InvalidSpec(e.to_string()))
    }
}

impl Default for CameraSpec {
    fn default() -> Self {
        Self::pinhole_facing(0.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SensorSpec {
    pub max_range: f64,
    /// Surface point density (points per m^2) at the 10 m reference range.
    pub density_at_10m: f64,
    /// Density scales with `(range / 10 m)^-falloff`.
    pub range_falloff: f64,
    /// Per-axis Gaussian position noise (m).
    pub noise_std: f64,
    /// Ground sample spacing (m); one jittered point per grid cell.
    pub ground_spacing: f64,
    /// LiDAR height above the ground (m).
    pub mount_height: f64,
    pub camera: CameraSpec,
}

impl Default for SensorSpec {
    fn default() -> Self {
        Self {
            max_range: 50.0,
            density_at_10m: 60.0,
            range_falloff: 1.5,
            noise_std: 0.02,
            ground_spacing: 0.25,
            mount_height: 1.8,
            camera: CameraSpec::default(),
        }
    }
}

impl SensorSpec {
    pub fn validate(&self) -> Result<(), SimError> {
        let positive = [
            self.max_range,
            self.density_at_10m,
            self.range_falloff,
            self.ground_spacing,
            self.mount_height,
        ];
        if positive.iter().any(|v| !(v.is_finite() && *v > 0.0)) || self.noise_std.is_nan() || self.noise_std < 0.0 {
            return Err(SimError::InvalidSpec("sensor parameters must be positive".into()));
        }
        self.camera.projection()?;
        self.camera.extrinsic()?;
        Ok(())
    }

    /// Sensor pose for an ego (ground-level) pose.
    pub fn sensor_pose(&self, ego: &Pose) -> Pose {
        Pose::new(ego.position[0], ego.position[1], ego.position[2] + self.mount_height, ego.yaw)
    }

    /// Expected surface density at `range` meters. Ranges under 1 m are
    /// treated as 1 m.
    pub fn density(&self, range: f64) -> f64 {
        self.density_at_10m * (range.max(1.0) / 10.0).powf(-self.range_falloff)
    }
}

/// Origin of a rendered point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PointLabel {
    Ground,
    Landmark(u64),
}

/// One frame's cloud in the sensor frame, with a label per point.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RenderedFrame {
    pub cloud: PointCloud,
    pub labels: Vec<PointLabel>,
}

fn intensity_mean(class: LandmarkClass) -> f64 {
    match class {
        LandmarkClass::Tree => 0.6,
        LandmarkClass::Bush => 0.4,
    }
}

const INTENSITY_STD: f64 = 0.1;
const GROUND_INTENSITY: f64 = 0.15;

/// Uniform point on an ellipsoid surface: a uniform direction on the unit
/// sphere, stretched, accepted with probability proportional to the local
/// area scale factor.
fn ellipsoid_point(rng: &mut ChaCha8Rng, r: [f64; 3]) -> [f64; 3] {
    let g_max = (r[1] * r[2]).max(r[0] * r[2]).max(r[0] * r[1]);
    loop {
        let z: f64 = rng.random_range(-1.0..=1.0);
        let phi: f64 = rng.random_range(0.0..std::f64::consts::TAU);
        let rho = (1.0 - z * z).max(0.0).sqrt();
        let u = [rho * phi.cos(), rho * phi.sin(), z];
        let g = ((r[1] * r[2] * u[0]).powi(2) + (r[0] * r[2] * u[1]).powi(2) + (r[0] * r[1] * u[2]).powi(2))
            .sqrt();
        if rng.random::<f64>() * g_max <= g {
            return [r[0] * u[0], r[1] * u[1], r[2] * u[2]];
        }
    }
}

fn stochastic_round(rng: &mut ChaCha8Rng, x: f64) -> usize {
    let base = x.floor();
    base as usize + usize::from(rng.random::<f64>() < x - base)
}

fn render_landmark(l: &Landmark, sensor_pose: &Pose, sensor: &SensorSpec, seed: u64) -> Vec<Point4> {
    let center = sensor_pose.to_sensor(l.bbox().center);
    let range = (center[0].powi(2) + center[1].powi(2) + center[2].powi(2)).sqrt();
    if range > sensor.max_range {
        return Vec::new();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let density = sensor.density(range);
    let n_canopy = stochastic_round(&mut rng, density * l.canopy_area());
    let n_trunk = stochastic_round(&mut rng, density * l.trunk_area());
    let noise = (sensor.noise_std > 0.0).then(|| Normal::new(0.0, sensor.noise_std).expect("finite std"));
    let intensity = Normal::new(intensity_mean(l.class), INTENSITY_STD).expect("finite std");

    let c = l.canopy_center();
    let radii = l.canopy_radii();
    let mut out = Vec::with_capacity(n_canopy + n_trunk);
    let mut emit = |rng: &mut ChaCha8Rng, world: [f64; 3]| {
        let mut p = sensor_pose.to_sensor(world);
        if let Some(n) = &noise {
            for v in &mut p {
                *v += n.sample(rng);
            }
        }
        let i = intensity.sample(rng).clamp(0.0, 1.0);
        if (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt() <= sensor.max_range {
            out.push(Point4::new(p[0], p[1], p[2], i));
        }
    };
    for _ in 0..n_canopy {
        let e = ellipsoid_point(&mut rng, radii);
        emit(&mut rng, [c[0] + e[0], c[1] + e[1], c[2] + e[2]]);
    }
    if let Some(t) = l.trunk {
        let r = 0.5 * t.diameter;
        for _ in 0..n_trunk {
            let a: f64 = rng.random_range(0.0..std::f64::consts::TAU);
            let z = rng.random_range(l.base..=l.trunk_top());
            emit(&mut rng, [l.position[0] + r * a.cos(), l.position[1] + r * a.sin(), z]);
        }
    }
    out
}

/// Ground samples on a jittered grid aligned with the sensor axes, one
/// random stream per grid row.
fn render_ground(sensor_pose: &Pose, sensor: &SensorSpec, seed: u64, exec: Execution) -> Vec<Point4> {
    let s = sensor.ground_spacing;
    let half = (sensor.max_range / s).ceil() as i64;
    let ground_z = -sensor_pose.position[2];
    let rows = par::map_range(exec, (2 * half) as usize, |row| {
        let j = row as i64 - half;
        let mut rng = ChaCha8Rng::seed_from_u64(stream_seed(seed, row as u64, streams::GROUND));
        let noise = (sensor.noise_std > 0.0).then(|| Normal::new(0.0, sensor.noise_std).expect("finite std"));
        let mut out = Vec::new();
        for i in -half..half {
            let x = (i as f64 + rng.random::<f64>()) * s;
            let y = (j as f64 + rng.random::<f64>()) * s;
            let dz = noise.as_ref().map_or(0.0, |n| n.sample(&mut rng));
            let intensity = (GROUND_INTENSITY + 0.05 * (rng.random::<f64>() - 0.5)).clamp(0.0, 1.0);
            let z = ground_z + dz;
            if (x * x + y * y + z * z).sqrt() <= sensor.max_range {
                out.push(Point4::new(x, y, z, intensity));
            }
        }
        out
    });
    rows.concat()
}

/// Renders one frame: landmark surface points (density falling off with
/// range), then ground. Points are in the sensor frame of the ego pose.
pub fn render_frame(world: &WorldSpec, ego: &Pose, sensor: &SensorSpec, seed: u64, exec: Execution) -> RenderedFrame {
    let sensor_pose = sensor.sensor_pose(ego);
    let per_landmark = par::map(exec, &world.landmarks, |l| {
        render_landmark(l, &sensor_pose, sensor, stream_seed(seed, l.id, streams::LANDMARK))
    });
    let ground = render_ground(&sensor_pose, sensor, seed, exec);

    let total = per_landmark.iter().map(Vec::len).sum::<usize>() + ground.len();
    let mut frame = RenderedFrame {
        cloud: Vec::with_capacity(total),
        labels: Vec::with_capacity(total),
    };
    for (l, pts) in world.landmarks.iter().zip(per_landmark) {
        frame.labels.extend(std::iter::repeat_n(PointLabel::Landmark(l.id), pts.len()));
        frame.cloud.extend(pts);
    }
    frame.labels.extend(std::iter::repeat_n(PointLabel::Ground, ground.len()));
    frame.cloud.extend(ground);
    frame
}
