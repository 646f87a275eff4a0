//! On-disk formats: point clouds, calibration, per-frame detections and
//! ground truth, and the replay manifest tying them together.
//!
//! A replay directory holds
//!
//! ```text
//! frames.json        {"dt": 0.1, "frames": [{"index", "pose", "cloud", "detections", "ground_truth"}]}
//! calibration.json   {"projection": [12], "extrinsic": [16], "image_size": [w, h]}
//! frame_0000.bin     little-endian f32 x, y, z, intensity per point
//! det_0000.json      [{"class", "score", "rect": [x_min, y_min, x_max, y_max]}]
//! gt_0000.json       [{"frame", "landmark", "class", "box": {"center", "dims"}}]
//! ```
//!
//! Clouds are in the sensor frame; `pose` maps them into the world.

use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::eval::GroundTruthBox;
use crate::geometry::{Point4, PointCloud, Pose};
use crate::par::Execution;
use crate::proposal::{Detection2D, DetectionRecord};
use crate::simulator::{CameraSpec, Scenario};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {msg}")]
    Parse { path: PathBuf, msg: String },
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> IoError + '_ {
    move |source| IoError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn parse_err(path: &Path, msg: impl ToString) -> IoError {
    IoError::Parse {
        path: path.to_path_buf(),
        msg: msg.to_string(),
    }
}

/// Camera calibration file contents.
pub type Calibration = CameraSpec;

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, IoError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    serde_json::from_str(&text).map_err(|e| parse_err(path, e))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), IoError> {
    let text = serde_json::to_string_pretty(value).map_err(|e| parse_err(path, e))?;
    fs::write(path, text).map_err(io_err(path))
}

pub fn read_bin(path: &Path) -> Result<PointCloud, IoError> {
    let bytes = fs::read(path).map_err(io_err(path))?;
    if bytes.len() % 16 != 0 {
        return Err(parse_err(path, format!("{} bytes is not a whole number of points", bytes.len())));
    }
    Ok(bytes
        .chunks_exact(16)
        .map(|c| {
            let f = |i: usize| f32::from_le_bytes(c[4 * i..4 * i + 4].try_into().expect("4 bytes")) as f64;
            Point4::new(f(0), f(1), f(2), f(3))
        })
        .collect())
}

pub fn write_bin(path: &Path, cloud: &[Point4]) -> Result<(), IoError> {
    let mut bytes = Vec::with_capacity(cloud.len() * 16);
    for p in cloud {
        for v in [p.x, p.y, p.z, p.intensity] {
            bytes.extend_from_slice(&(v as f32).to_le_bytes());
        }
    }
    fs::write(path, bytes).map_err(io_err(path))
}

/// Reads `x,y,z,intensity` rows. A non-numeric first line is taken as a
/// header; blank lines are skipped.
pub fn read_csv(path: &Path) -> Result<PointCloud, IoError> {
    let file = fs::File::open(path).map_err(io_err(path))?;
    let mut out = Vec::new();
    for (n, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(io_err(path))?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Result<Vec<f64>, _> = line.split(',').map(|s| s.trim().parse::<f64>()).collect();
        match fields {
            Ok(v) if v.len() == 4 => out.push(Point4::new(v[0], v[1], v[2], v[3])),
            Err(_) if n == 0 => continue,
            _ => return Err(parse_err(path, format!("line {}: expected 4 numbers", n + 1))),
        }
    }
    Ok(out)
}

pub fn write_csv(path: &Path, cloud: &[Point4]) -> Result<(), IoError> {
    let file = fs::File::create(path).map_err(io_err(path))?;
    let mut w = BufWriter::new(file);
    writeln!(w, "x,y,z,intensity").map_err(io_err(path))?;
    for p in cloud {
        writeln!(w, "{},{},{},{}", p.x, p.y, p.z, p.intensity).map_err(io_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

/// Loads a cloud by extension: `.bin` or `.csv`.
pub fn read_cloud(path: &Path) -> Result<PointCloud, IoError> {
    match path.extension().and_then(|e| e.to_str()) {
        Some("bin") => read_bin(path),
        Some("csv") => read_csv(path),
        _ => Err(parse_err(path, "unknown cloud format (expected .bin or .csv)")),
    }
}

pub fn read_detections(path: &Path) -> Result<Vec<Detection2D>, IoError> {
    let records: Vec<DetectionRecord> = read_json(path)?;
    Ok(records.iter().map(Detection2D::from).collect())
}

pub fn write_detections(path: &Path, dets: &[Detection2D]) -> Result<(), IoError> {
    let records: Vec<DetectionRecord> = dets.iter().map(DetectionRecord::from).collect();
    write_json(path, &records)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestFrame {
    pub index: u64,
    /// Sensor pose in the world frame.
    pub pose: Pose,
    pub cloud: String,
    pub detections: String,
    #[serde(default)]
    pub ground_truth: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub dt: f64,
    pub frames: Vec<ManifestFrame>,
}

pub const MANIFEST_FILE: &str = "frames.json";
pub const CALIBRATION_FILE: &str = "calibration.json";

/// One frame loaded from a replay directory.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplayFrame {
    pub index: u64,
    pub pose: Pose,
    pub cloud: PointCloud,
    pub detections: Vec<Detection2D>,
    pub ground_truth: Option<Vec<GroundTruthBox>>,
}

#[derive(Debug, Clone)]
pub struct ReplayDir {
    pub root: PathBuf,
    pub manifest: Manifest,
    pub calibration: Calibration,
}

impl ReplayDir {
    pub fn open(root: &Path) -> Result<Self, IoError> {
        let manifest: Manifest = read_json(&root.join(MANIFEST_FILE))?;
        let calibration: Calibration = read_json(&root.join(CALIBRATION_FILE))?;
        calibration
            .projection()
            .and(calibration.extrinsic())
            .map_err(|e| parse_err(&root.join(CALIBRATION_FILE), e))?;
        Ok(Self {
            root: root.to_path_buf(),
            manifest,
            calibration,
        })
    }

    pub fn load_frame(&self, f: &ManifestFrame) -> Result<ReplayFrame, IoError> {
        Ok(ReplayFrame {
            index: f.index,
            pose: f.pose,
            cloud: read_cloud(&self.root.join(&f.cloud))?,
            detections: read_detections(&self.root.join(&f.detections))?,
            ground_truth: f
                .ground_truth
                .as_ref()
                .map(|g| read_json(&self.root.join(g)))
                .transpose()?,
        })
    }
}

/// Renders every frame of a scenario into a replay directory.
pub fn export_replay(scenario: &Scenario, dir: &Path, exec: Execution) -> Result<Manifest, IoError> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    write_json(&dir.join(CALIBRATION_FILE), &scenario.sensor.camera)?;
    let mut manifest = Manifest {
        dt: scenario.dt,
        frames: Vec::with_capacity(scenario.n_frames),
    };
    for (i, ego) in scenario.ego_poses().into_iter().enumerate() {
        let f = scenario.frame_at(i as u64, ego, exec);
        let entry = ManifestFrame {
            index: f.index,
            pose: f.sensor_pose,
            cloud: format!("frame_{i:04}.bin"),
            detections: format!("det_{i:04}.json"),
            ground_truth: Some(format!("gt_{i:04}.json")),
        };
        write_bin(&dir.join(&entry.cloud), &f.rendered.cloud)?;
        write_detections(&dir.join(&entry.detections), &f.detector.detections)?;
        write_json(&dir.join(entry.ground_truth.as_ref().expect("set above")), &f.ground_truth)?;
        manifest.frames.push(entry);
    }
    write_json(&dir.join(MANIFEST_FILE), &manifest)?;
    Ok(manifest)
}
