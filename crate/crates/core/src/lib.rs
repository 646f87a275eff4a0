//! Semantic landmark detection from LiDAR point clouds and classified 2D
//! detections.
//!
//! The pipeline clusters a frame's point cloud into 3D instances, attaches
//! class proposals by projecting instance boxes into the image and matching
//! them to 2D detections, tracks instances over time with a greedy
//! Dirichlet-process filter, and classifies each track's accumulated cloud
//! with its fused class prior.

pub mod classes;
pub mod classifier;
pub mod clustering;
pub mod eval;
pub mod gdpf;
pub mod geometry;
pub mod io;
pub mod par;
pub mod pipeline;
pub mod proposal;
pub mod simulator;

pub use classes::{ClassScores, LandmarkClass};
pub use geometry::{Box3D, CameraProjection, Extrinsic, Point4, Pose, Rect2D};
pub use par::Execution;
