//! Sensor-frame geometry: LiDAR points, calibration matrices, axis-aligned
//! 3D boxes, image rectangles and the signed box distances used by the
//! tracker's association score.
//!
//! Conventions: the LiDAR frame is x forward, y left, z up. Boxes are
//! axis-aligned in whatever frame their center is expressed in.

use nalgebra::{Matrix3x4, Matrix4, Vector3, Vector4};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Homogeneous `w` at or below this value is treated as behind the camera.
pub const BEHIND_CAMERA_EPS: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("point projects behind the camera (w = {0})")]
    BehindCamera(f64),
    #[error("no box corner projects in front of the camera")]
    AllBehindCamera,
    #[error("invalid extrinsic: {0}")]
    InvalidExtrinsic(String),
    #[error("invalid projection matrix: {0}")]
    InvalidProjection(String),
    #[error("invalid box: {0}")]
    InvalidBox(String),
}

/// A LiDAR return: position in meters plus reflectance intensity in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point4 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub intensity: f64,
}

impl Point4 {
    pub const fn new(x: f64, y: f64, z: f64, intensity: f64) -> Self {
        Self { x, y, z, intensity }
    }

    pub fn xyz(&self) -> Vector3<f64> {
        Vector3::new(self.x, self.y, self.z)
    }

    pub fn is_valid(&self) -> bool {
        self.x.is_finite()
            && self.y.is_finite()
            && self.z.is_finite()
            && (0.0..=1.0).contains(&self.intensity)
    }
}

pub type PointCloud = Vec<Point4>;

/// Rigid transform from the LiDAR frame into the camera frame (`H_d^c`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extrinsic(Matrix4<f64>);

impl Extrinsic {
    pub fn new(m: Matrix4<f64>) -> Result<Self, GeometryError> {
        if m.iter().any(|v| !v.is_finite()) {
            return Err(GeometryError::InvalidExtrinsic("non-finite entry".into()));
        }
        let bottom = m.row(3);
        if (bottom[0].abs() + bottom[1].abs() + bottom[2].abs() + (bottom[3] - 1.0).abs()) > 1e-9 {
            return Err(GeometryError::InvalidExtrinsic(
                "bottom row must be (0, 0, 0, 1)".into(),
            ));
        }
        let r = m.fixed_view::<3, 3>(0, 0).into_owned();
        let ortho = (r.transpose() * r - nalgebra::Matrix3::identity()).abs().max();
        if ortho > 1e-9 {
            return Err(GeometryError::InvalidExtrinsic(format!(
                "rotation block not orthonormal (deviation {ortho:e})"
            )));
        }
        if (r.determinant() - 1.0).abs() > 1e-9 {
            return Err(GeometryError::InvalidExtrinsic(
                "rotation block must have determinant +1".into(),
            ));
        }
        Ok(Self(m))
    }

    pub fn from_row_slice(values: &[f64]) -> Result<Self, GeometryError> {
        if values.len() != 16 {
            return Err(GeometryError::InvalidExtrinsic(format!(
                "expected 16 values, got {}",
                values.len()
            )));
        }
        Self::new(Matrix4::from_row_slice(values))
    }

    pub fn identity() -> Self {
        Self(Matrix4::identity())
    }

    pub fn matrix(&self) -> &Matrix4<f64> {
        &self.0
    }

    pub fn to_row_vec(&self) -> Vec<f64> {
        self.0.transpose().iter().copied().collect()
    }
}

/// Camera projection matrix (`P_c^I`), camera frame to pixels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CameraProjection(Matrix3x4<f64>);

impl CameraProjection {
    pub fn new(m: Matrix3x4<f64>) -> Result<Self, GeometryError> {
        if m.iter().any(|v| !v.is_finite()) {
            return Err(GeometryError::InvalidProjection("non-finite entry".into()));
        }
        if m.iter().all(|v| *v == 0.0) {
            return Err(GeometryError::InvalidProjection("all entries zero".into()));
        }
        Ok(Self(m))
    }

    pub fn from_row_slice(values: &[f64]) -> Result<Self, GeometryError> {
        if values.len() != 12 {
            return Err(GeometryError::InvalidProjection(format!(
                "expected 12 values, got {}",
                values.len()
            )));
        }
        Self::new(Matrix3x4::from_row_slice(values))
    }

    /// `K [I | 0]` for a pinhole camera.
    pub fn pinhole(fx: f64, fy: f64, cx: f64, cy: f64) -> Self {
        Self(Matrix3x4::new(
            fx, 0.0, cx, 0.0, //
            0.0, fy, cy, 0.0, //
            0.0, 0.0, 1.0, 0.0,
        ))
    }

    pub fn matrix(&self) -> &Matrix3x4<f64> {
        &self.0
    }

    pub fn to_row_vec(&self) -> Vec<f64> {
        // nalgebra stores column-major
        let mut out = Vec::with_capacity(12);
        for r in 0..3 {
            for c in 0..4 {
                out.push(self.0[(r, c)]);
            }
        }
        out
    }
}

/// Axis-aligned box: `center` plus `dims = (length along x, width along y, height along z)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Box3D {
    pub center: [f64; 3],
    pub dims: [f64; 3],
}

impl Box3D {
    pub fn new(center: [f64; 3], dims: [f64; 3]) -> Result<Self, GeometryError> {
        let b = Self { center, dims };
        if !b.is_valid() {
            return Err(GeometryError::InvalidBox(format!(
                "center {center:?} dims {dims:?}"
            )));
        }
        Ok(b)
    }

    pub fn is_valid(&self) -> bool {
        self.center.iter().all(|v| v.is_finite())
            && self.dims.iter().all(|d| d.is_finite() && *d > 0.0)
    }

    pub fn from_min_max(min: [f64; 3], max: [f64; 3]) -> Self {
        Self {
            center: [
                0.5 * (min[0] + max[0]),
                0.5 * (min[1] + max[1]),
                0.5 * (min[2] + max[2]),
            ],
            dims: [max[0] - min[0], max[1] - min[1], max[2] - min[2]],
        }
    }

    /// Tight bound of a point set. Degenerate extents are padded to `min_extent`.
    pub fn bounding(points: &[Point4], min_extent: f64) -> Option<Self> {
        let first = points.first()?;
        let mut lo = [first.x, first.y, first.z];
        let mut hi = lo;
        for p in &points[1..] {
            for (a, v) in [p.x, p.y, p.z].into_iter().enumerate() {
                lo[a] = lo[a].min(v);
                hi[a] = hi[a].max(v);
            }
        }
        let mut b = Self::from_min_max(lo, hi);
        for d in &mut b.dims {
            *d = d.max(min_extent);
        }
        Some(b)
    }

    pub fn min(&self) -> [f64; 3] {
        [
            self.center[0] - 0.5 * self.dims[0],
            self.center[1] - 0.5 * self.dims[1],
            self.center[2] - 0.5 * self.dims[2],
        ]
    }

    pub fn max(&self) -> [f64; 3] {
        [
            self.center[0] + 0.5 * self.dims[0],
            self.center[1] + 0.5 * self.dims[1],
            self.center[2] + 0.5 * self.dims[2],
        ]
    }

    pub fn volume(&self) -> f64 {
        self.dims[0] * self.dims[1] * self.dims[2]
    }

    /// Smallest box enclosing both.
    pub fn union(&self, other: &Box3D) -> Box3D {
        let (a0, a1, b0, b1) = (self.min(), self.max(), other.min(), other.max());
        Box3D::from_min_max(
            [a0[0].min(b0[0]), a0[1].min(b0[1]), a0[2].min(b0[2])],
            [a1[0].max(b1[0]), a1[1].max(b1[1]), a1[2].max(b1[2])],
        )
    }

    /// Closed containment (boundary counts as inside), with a 1e-9 m
    /// allowance for center/extent rounding.
    pub fn contains(&self, p: [f64; 3]) -> bool {
        let (lo, hi) = (self.min(), self.max());
        (0..3).all(|a| p[a] >= lo[a] - 1e-9 && p[a] <= hi[a] + 1e-9)
    }

    /// Open containment (boundary counts as outside).
    pub fn strictly_contains(&self, p: [f64; 3]) -> bool {
        let (lo, hi) = (self.min(), self.max());
        (0..3).all(|a| p[a] > lo[a] && p[a] < hi[a])
    }

    /// The 8 corners, x varying fastest.
    pub fn corners(&self) -> [[f64; 3]; 8] {
        let (lo, hi) = (self.min(), self.max());
        let mut out = [[0.0; 3]; 8];
        for (i, c) in out.iter_mut().enumerate() {
            *c = [
                if i & 1 == 0 { lo[0] } else { hi[0] },
                if i & 2 == 0 { lo[1] } else { hi[1] },
                if i & 4 == 0 { lo[2] } else { hi[2] },
            ];
        }
        out
    }
}

/// Planar sensor pose in the world frame: position plus yaw about +z.
/// Maps sensor coordinates to world coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Pose {
    pub position: [f64; 3],
    pub yaw: f64,
}

impl Pose {
    pub fn new(x: f64, y: f64, z: f64, yaw: f64) -> Self {
        Self { position: [x, y, z], yaw }
    }

    pub fn to_world(&self, p: [f64; 3]) -> [f64; 3] {
        let (s, c) = self.yaw.sin_cos();
        [
            c * p[0] - s * p[1] + self.position[0],
            s * p[0] + c * p[1] + self.position[1],
            p[2] + self.position[2],
        ]
    }

    pub fn to_sensor(&self, p: [f64; 3]) -> [f64; 3] {
        let (s, c) = self.yaw.sin_cos();
        let (dx, dy) = (p[0] - self.position[0], p[1] - self.position[1]);
        [c * dx + s * dy, -s * dx + c * dy, p[2] - self.position[2]]
    }

    pub fn point_to_world(&self, p: &Point4) -> Point4 {
        let [x, y, z] = self.to_world([p.x, p.y, p.z]);
        Point4::new(x, y, z, p.intensity)
    }

    /// Axis-aligned bound, in the sensor frame, of a world-frame box.
    pub fn box_to_sensor(&self, b: &Box3D) -> Box3D {
        let mut lo = [f64::INFINITY; 3];
        let mut hi = [f64::NEG_INFINITY; 3];
        for c in b.corners() {
            let q = self.to_sensor(c);
            for a in 0..3 {
                lo[a] = lo[a].min(q[a]);
                hi[a] = hi[a].max(q[a]);
            }
        }
        Box3D::from_min_max(lo, hi)
    }
}

/// Image-plane rectangle in pixels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect2D {
    pub x_min: f64,
    pub y_min: f64,
    pub x_max: f64,
    pub y_max: f64,
}

impl Rect2D {
    pub fn new(x_min: f64, y_min: f64, x_max: f64, y_max: f64) -> Self {
        Self {
            x_min,
            y_min,
            x_max,
            y_max,
        }
    }

    pub fn is_valid(&self) -> bool {
        [self.x_min, self.y_min, self.x_max, self.y_max]
            .iter()
            .all(|v| v.is_finite())
            && self.x_min <= self.x_max
            && self.y_min <= self.y_max
    }

    pub fn width(&self) -> f64 {
        (self.x_max - self.x_min).max(0.0)
    }

    pub fn height(&self) -> f64 {
        (self.y_max - self.y_min).max(0.0)
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    /// Intersection with `[0, width] x [0, height]`, or `None` if empty.
    pub fn clip(&self, width: f64, height: f64) -> Option<Rect2D> {
        let r = Rect2D::new(
            self.x_min.max(0.0),
            self.y_min.max(0.0),
            self.x_max.min(width),
            self.y_max.min(height),
        );
        (r.x_min < r.x_max && r.y_min < r.y_max).then_some(r)
    }

    pub fn to_array(&self) -> [f64; 4] {
        [self.x_min, self.y_min, self.x_max, self.y_max]
    }
}

/// Projects a LiDAR-frame point to pixel coordinates: `(p~, w) = P H (p, 1)`,
/// then `(p~x / w, p~y / w)`.
pub fn project_point(
    p: [f64; 3],
    extrinsic: &Extrinsic,
    projection: &CameraProjection,
) -> Result<[f64; 2], GeometryError> {
    let homog = projection.matrix() * (extrinsic.matrix() * Vector4::new(p[0], p[1], p[2], 1.0));
    let w = homog[2];
    if w <= BEHIND_CAMERA_EPS {
        return Err(GeometryError::BehindCamera(w));
    }
    Ok([homog[0] / w, homog[1] / w])
}

/// Encasing rectangle of the projected box corners. Corners behind the
/// camera are skipped.
pub fn project_box(
    b: &Box3D,
    extrinsic: &Extrinsic,
    projection: &CameraProjection,
) -> Result<Rect2D, GeometryError> {
    let mut rect: Option<Rect2D> = None;
    for corner in b.corners() {
        let Ok([u, v]) = project_point(corner, extrinsic, projection) else {
            continue;
        };
        rect = Some(match rect {
            None => Rect2D::new(u, v, u, v),
            Some(r) => Rect2D::new(r.x_min.min(u), r.y_min.min(v), r.x_max.max(u), r.y_max.max(v)),
        });
    }
    rect.ok_or(GeometryError::AllBehindCamera)
}

pub fn iou_2d(a: &Rect2D, b: &Rect2D) -> f64 {
    let iw = (a.x_max.min(b.x_max) - a.x_min.max(b.x_min)).max(0.0);
    let ih = (a.y_max.min(b.y_max) - a.y_min.max(b.y_min)).max(0.0);
    let inter = iw * ih;
    let union = a.area() + b.area() - inter;
    if union <= 0.0 || inter <= 0.0 {
        return 0.0;
    }
    (inter / union).clamp(0.0, 1.0)
}

/// Axis-aligned volumetric IoU.
pub fn overlap_3d(a: &Box3D, b: &Box3D) -> f64 {
    let (a0, a1, b0, b1) = (a.min(), a.max(), b.min(), b.max());
    let mut inter = 1.0;
    for k in 0..3 {
        let e = (a1[k].min(b1[k]) - a0[k].max(b0[k])).max(0.0);
        inter *= e;
    }
    let union = a.volume() + b.volume() - inter;
    if union <= 0.0 || inter <= 0.0 {
        return 0.0;
    }
    (inter / union).clamp(0.0, 1.0)
}

/// One of the six faces of an axis-aligned box.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoxSide {
    pub axis: usize,
    pub positive: bool,
}

impl BoxSide {
    pub const ALL: [BoxSide; 6] = [
        BoxSide { axis: 0, positive: false },
        BoxSide { axis: 0, positive: true },
        BoxSide { axis: 1, positive: false },
        BoxSide { axis: 1, positive: true },
        BoxSide { axis: 2, positive: false },
        BoxSide { axis: 2, positive: true },
    ];

    /// Sides are indexed 0..6 as (-x, +x, -y, +y, -z, +z).
    pub fn from_index(i: usize) -> Option<Self> {
        Self::ALL.get(i).copied()
    }
}

/// Distance from `c` to the bounded face rectangle of `side`.
fn distance_to_face(c: [f64; 3], b: &Box3D, side: BoxSide) -> f64 {
    let (lo, hi) = (b.min(), b.max());
    let plane = if side.positive { hi[side.axis] } else { lo[side.axis] };
    let mut sq = (c[side.axis] - plane).powi(2);
    for a in (0..3).filter(|a| *a != side.axis) {
        let clamped = c[a].clamp(lo[a], hi[a]);
        sq += (c[a] - clamped).powi(2);
    }
    sq.sqrt()
}

/// Signed distance of `c` to one side of `b`: the perpendicular distance to
/// the face plane when `b` strictly contains `c`, otherwise minus the
/// closest-point distance to the bounded face.
pub fn signed_distance(c: [f64; 3], b: &Box3D, side: BoxSide) -> f64 {
    if b.strictly_contains(c) {
        let (lo, hi) = (b.min(), b.max());
        let plane = if side.positive { hi[side.axis] } else { lo[side.axis] };
        (c[side.axis] - plane).abs()
    } else {
        -distance_to_face(c, b, side)
    }
}

/// Maximum of [`signed_distance`] over all six sides.
pub fn max_signed_distance(c: [f64; 3], b: &Box3D) -> f64 {
    BoxSide::ALL
        .iter()
        .map(|s| signed_distance(c, b, *s))
        .fold(f64::NEG_INFINITY, f64::max)
}
