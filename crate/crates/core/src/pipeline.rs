//! Frame-by-frame orchestration: clustering, class proposals, tracking and
//! classification, with wall-clock timing per stage and all file outputs.
//!
//! Clouds arrive in the sensor frame. Clustering and proposals work there
//! (the camera calibration is sensor-relative); instances are then moved to
//! the world frame with the frame's pose and re-bounded before tracking, so
//! static landmarks stay static in the filter.

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classes::{ClassScores, LandmarkClass};
use crate::classifier::{
    classify_geometric, sample_points, ClassifierKind, ExternalClassifier, SampledCloud,
};
use crate::clustering::{segment, ClusteringConfig, Instance3D, MIN_BOX_EXTENT};
use crate::eval::{compute_metrics, match_frame, FrameMatch, GroundTruthBox, MetricsReport, ReportedBox, StageStats};
use crate::gdpf::{AssociationRecord, Gdpf, GdpfConfig, GdpfError, Measurement, TrackedComponent};
use crate::geometry::{Box3D, CameraProjection, Extrinsic, PointCloud, Pose};
use crate::io::{Calibration, IoError, ReplayDir};
use crate::par::{self, Execution};
use crate::proposal::{generate_proposals, Detection2D, ProposalConfig};
use crate::simulator::{slab_indices, stream_seed, PointLabel, Scenario, SimError};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] IoError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Filter(#[from] GdpfError),
}

/// Stage names used in timing reports.
pub const STAGES: [&str; 5] = ["clustering", "proposal", "tracking", "classification", "total"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineConfig {
    /// IoU threshold for matching projected instances to detections.
    pub tau: f64,
    /// Points per classifier input.
    pub n_p: usize,
    pub classifier: ClassifierKind,
    /// Shell command for the external classifier.
    pub external_cmd: Option<String>,
    pub external_timeout_ms: u64,
    pub gdpf: GdpfConfig,
    pub clustering: ClusteringConfig,
    pub seed: u64,
    pub scenario: Option<PathBuf>,
    pub replay: Option<PathBuf>,
    pub metrics_out: Option<PathBuf>,
    pub tracks_out: Option<PathBuf>,
    /// Directory for labeled classifier training records (simulation only).
    pub export_components: Option<PathBuf>,
    /// Export every this many frames.
    pub export_every: usize,
    /// Components at or above this existence with a non-unknown argmax are
    /// reported as detections.
    pub report_existence: f64,
    /// Clip projected instance rectangles to the image before matching.
    pub clip_to_image: bool,
    pub execution: Execution,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            tau: 0.2,
            n_p: 1024,
            classifier: ClassifierKind::GeometricBaseline,
            external_cmd: None,
            external_timeout_ms: 200,
            gdpf: GdpfConfig::default(),
            clustering: ClusteringConfig::default(),
            seed: 0,
            scenario: None,
            replay: None,
            metrics_out: None,
            tracks_out: None,
            export_components: None,
            export_every: 10,
            report_existence: 0.5,
            clip_to_image: true,
            execution: Execution::Parallel,
        }
    }
}

impl PipelineConfig {
    pub fn load(path: &Path) -> Result<Self, PipelineError> {
        Ok(crate::io::read_json(path)?)
    }

    /// Checks hard constraints and returns soft warnings.
    pub fn validate(&self) -> Result<Vec<String>, PipelineError> {
        let mut warnings = Vec::new();
        if !(0.0..=1.0).contains(&self.tau) {
            return Err(PipelineError::Config(format!("tau must be in [0, 1], got {}", self.tau)));
        }
        if self.n_p == 0 {
            return Err(PipelineError::Config("n_p must be positive".into()));
        }
        if self.n_p != 512 && self.n_p != 1024 {
            warnings.push(format!("n_p = {} is outside the studied values 512 and 1024", self.n_p));
        }
        if self.export_every == 0 {
            return Err(PipelineError::Config("export_every must be positive".into()));
        }
        if self.classifier == ClassifierKind::ExternalProtocol && self.external_cmd.is_none() {
            return Err(PipelineError::Config("external classifier needs external_cmd".into()));
        }
        if self.scenario.is_some() && self.replay.is_some() {
            return Err(PipelineError::Config("give either a scenario or a replay directory, not both".into()));
        }
        self.gdpf.validate()?;
        Ok(warnings)
    }
}

/// Everything the pipeline consumes for one frame.
#[derive(Debug, Clone, Default)]
pub struct FrameInput {
    pub index: u64,
    /// Sensor pose in the world frame.
    pub pose: Pose,
    /// Seconds since the previous frame; 0 for the first.
    pub dt: f64,
    pub cloud: PointCloud,
    pub detections: Vec<Detection2D>,
    /// Pre-segmented instances; bypasses clustering when set.
    pub instances: Option<Vec<Instance3D>>,
}

/// Milliseconds spent per stage.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StageTimes {
    pub clustering: f64,
    pub proposal: f64,
    pub tracking: f64,
    pub classification: f64,
    pub total: f64,
}

impl StageTimes {
    fn as_array(&self) -> [f64; 5] {
        [self.clustering, self.proposal, self.tracking, self.classification, self.total]
    }
}

#[derive(Debug, Clone)]
pub struct FrameOutput {
    pub index: u64,
    /// All live components after classification.
    pub components: Vec<TrackedComponent>,
    pub reported: Vec<ReportedBox>,
    /// Sensor-frame instances, in measurement order.
    pub instances: Vec<Instance3D>,
    pub association: AssociationRecord,
    pub times: StageTimes,
    pub warnings: Vec<String>,
}

enum Backend {
    Geometric,
    External(Option<ExternalClassifier>),
}

fn ms(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

/// Stateful per-sequence pipeline.
pub struct Pipeline {
    cfg: PipelineConfig,
    gdpf: Gdpf,
    extrinsic: Extrinsic,
    projection: CameraProjection,
    proposal: ProposalConfig,
    backend: Backend,
    degraded: usize,
}

impl std::fmt::Debug for Pipeline {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Pipeline")
            .field("cfg", &self.cfg)
            .field("components", &self.gdpf.components().len())
            .field("degraded", &self.degraded)
            .finish()
    }
}

impl Pipeline {
    pub fn new(cfg: &PipelineConfig, calibration: &Calibration) -> Result<Self, PipelineError> {
        cfg.validate()?;
        let gdpf = Gdpf::new(GdpfConfig {
            seed: cfg.seed,
            ..cfg.gdpf.clone()
        })?;
        let backend = match cfg.classifier {
            ClassifierKind::GeometricBaseline => Backend::Geometric,
            ClassifierKind::ExternalProtocol => {
                let cmd = cfg.external_cmd.as_deref().unwrap_or_default();
                let timeout = Duration::from_millis(cfg.external_timeout_ms);
                match ExternalClassifier::spawn(cmd, timeout) {
                    Ok(c) => Backend::External(Some(c)),
                    Err(e) => {
                        log::warn!("external classifier unavailable, using priors: {e}");
                        Backend::External(None)
                    }
                }
            }
        };
        Ok(Self {
            gdpf,
            extrinsic: calibration.extrinsic()?,
            projection: calibration.projection()?,
            proposal: ProposalConfig {
                tau: cfg.tau,
                num_classes: LandmarkClass::COUNT,
                image_size: cfg.clip_to_image.then_some(calibration.image_size),
            },
            backend,
            degraded: 0,
            cfg: cfg.clone(),
        })
    }

    pub fn filter(&self) -> &Gdpf {
        &self.gdpf
    }

    /// Classifier calls that fell back to the prior so far.
    pub fn degraded_calls(&self) -> usize {
        self.degraded
    }

    fn to_measurements(&self, instances: &[Instance3D], pose: &Pose, frame: u64) -> Vec<Measurement> {
        par::map(self.cfg.execution, instances, |inst| {
            let points: Vec<_> = inst.points.iter().map(|p| pose.point_to_world(p)).collect();
            let bbox = Box3D::bounding(&points, MIN_BOX_EXTENT).expect("instances are non-empty");
            Measurement {
                bbox,
                class_proposal: inst
                    .class_proposal
                    .clone()
                    .unwrap_or_else(|| ClassScores::uniform(LandmarkClass::COUNT)),
                points,
                frame_index: frame,
                index_in_frame: inst.id,
            }
        })
    }

    fn sample_seed(&self, frame: u64, id: u64) -> u64 {
        stream_seed(self.cfg.seed, frame, id)
    }

    fn classify(&mut self, frame: u64) -> Vec<String> {
        let n_p = self.cfg.n_p;
        let exec = self.cfg.execution;
        let seed = self.cfg.seed;
        let jobs: Vec<(u64, ClassScores, Option<SampledCloud>)> = par::map(exec, self.gdpf.components(), |c| {
            let sample = sample_points(&c.accumulated_points, n_p, stream_seed(seed, frame, c.id)).ok();
            (c.id, c.class_scores.clone(), sample)
        });
        let mut warnings = Vec::new();
        let results: Vec<(u64, ClassScores)> = match &mut self.backend {
            Backend::Geometric => par::map(exec, &jobs, |(id, prior, sample)| {
                let scores = sample
                    .as_ref()
                    .map_or_else(|| prior.clone(), |s| classify_geometric(s, prior));
                (*id, scores)
            }),
            Backend::External(client) => {
                let mut out = Vec::with_capacity(jobs.len());
                for (id, prior, sample) in &jobs {
                    let Some(sample) = sample else { continue };
                    let scores = match client {
                        Some(c) => {
                            let r = c.classify(sample, prior);
                            if let Some(e) = r.error {
                                self.degraded += 1;
                                warnings.push(format!("frame {frame} component {id}: {e}"));
                            }
                            r.scores
                        }
                        None => {
                            self.degraded += 1;
                            prior.clone()
                        }
                    };
                    out.push((*id, scores));
                }
                out
            }
        };
        for (id, scores) in results {
            self.gdpf.apply_classification(id, &scores);
        }
        warnings
    }

    /// Runs all stages on one frame.
    pub fn process(&mut self, input: FrameInput) -> FrameOutput {
        let start = Instant::now();
        let mut times = StageTimes::default();

        let t = Instant::now();
        let instances = match input.instances {
            Some(v) => v,
            None => segment(&input.cloud, &self.cfg.clustering),
        };
        times.clustering = ms(t.elapsed());

        let t = Instant::now();
        let instances = generate_proposals(
            instances,
            &input.detections,
            &self.extrinsic,
            &self.projection,
            &self.proposal,
            self.cfg.execution,
        );
        times.proposal = ms(t.elapsed());

        let t = Instant::now();
        let measurements = self.to_measurements(&instances, &input.pose, input.index);
        let result = self.gdpf.step(&measurements, input.dt);
        times.tracking = ms(t.elapsed());

        let t = Instant::now();
        let mut warnings: Vec<String> = result.warnings.iter().map(|w| format!("frame {}: {w}", input.index)).collect();
        warnings.extend(self.classify(input.index));
        times.classification = ms(t.elapsed());

        let components: Vec<TrackedComponent> =
            self.gdpf.components().iter().map(TrackedComponent::from_component).collect();
        let reported = components
            .iter()
            .filter(|c| c.existence >= self.cfg.report_existence)
            .filter_map(|c| {
                c.class_scores.landmark_class().map(|class| ReportedBox {
                    id: c.id,
                    class,
                    bbox: c.box3d(),
                })
            })
            .collect();
        times.total = ms(start.elapsed());
        FrameOutput {
            index: input.index,
            components,
            reported,
            instances,
            association: result.association,
            times,
            warnings,
        }
    }
}

/// One line of the track dump.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrackDumpLine {
    pub frame: u64,
    pub components: Vec<TrackedComponent>,
}

/// One labeled classifier training record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentRecord {
    pub frame: u64,
    pub component: u64,
    pub points: Vec<[f64; 4]>,
    pub prior: ClassScores,
    pub true_class: LandmarkClass,
}

pub const COMPONENTS_FILE: &str = "components.jsonl";

/// Per-component vote counts of the ground-truth landmark behind its
/// measurements' points.
#[derive(Debug, Default)]
struct LabelVotes(HashMap<u64, BTreeMap<u64, usize>>);

impl LabelVotes {
    fn add(&mut self, out: &FrameOutput, labels: &[PointLabel]) {
        for (m, inst) in out.instances.iter().enumerate() {
            let comp = out.association.assignments[m];
            let votes = self.0.entry(comp).or_default();
            for &i in &inst.indices {
                if let Some(PointLabel::Landmark(l)) = labels.get(i) {
                    *votes.entry(*l).or_default() += 1;
                }
            }
        }
    }

    /// Landmark with the most votes, lowest id on ties.
    fn majority(&self, comp: u64) -> Option<u64> {
        let votes = self.0.get(&comp)?;
        let best = votes.values().copied().max()?;
        votes.iter().find(|(_, &v)| v == best).map(|(l, _)| *l)
    }
}

/// A frame plus whatever ground truth its source provides.
#[derive(Debug, Clone, Default)]
pub struct SourceFrame {
    pub input: FrameInput,
    pub ground_truth: Option<Vec<GroundTruthBox>>,
    pub labels: Option<Vec<PointLabel>>,
}

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub frames: usize,
    /// Present when every frame had ground truth.
    pub metrics: Option<MetricsReport>,
    pub warnings: Vec<String>,
    pub degraded_calls: usize,
    pub exported_records: usize,
    pub runtime_ms: BTreeMap<String, StageStats>,
}

/// Sensor-frame instances made by slicing each landmark's points into
/// `slabs` vertical slabs, ordered by landmark id then slab.
pub fn slab_instances(cloud: &[crate::geometry::Point4], labels: &[PointLabel], slabs: usize) -> Vec<Instance3D> {
    let mut by_landmark: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
    for (i, l) in labels.iter().enumerate() {
        if let PointLabel::Landmark(id) = l {
            by_landmark.entry(*id).or_default().push(i);
        }
    }
    let mut out = Vec::new();
    for idx in by_landmark.values() {
        let pts: Vec<_> = idx.iter().map(|&i| cloud[i]).collect();
        for slab in slab_indices(&pts, slabs) {
            let points = slab.iter().map(|&k| pts[k]).collect();
            let indices = slab.iter().map(|&k| idx[k]).collect();
            if let Some(inst) = Instance3D::from_points(out.len(), points, indices) {
                out.push(inst);
            }
        }
    }
    out
}

/// Drives a pipeline over a frame source and writes the configured outputs.
pub fn drive<I>(
    cfg: &PipelineConfig,
    calibration: &Calibration,
    frames: I,
    landmark_classes: &HashMap<u64, LandmarkClass>,
) -> Result<RunSummary, PipelineError>
where
    I: IntoIterator<Item = Result<SourceFrame, PipelineError>>,
{
    let mut warnings = cfg.validate()?;
    let mut pipeline = Pipeline::new(cfg, calibration)?;
    let mut tracks = cfg
        .tracks_out
        .as_ref()
        .map(|p| create(p).map(BufWriter::new))
        .transpose()?;
    let mut export = match &cfg.export_components {
        Some(dir) => {
            fs::create_dir_all(dir).map_err(|source| IoError::Io {
                path: dir.clone(),
                source,
            })?;
            let path = dir.join(COMPONENTS_FILE);
            Some((BufWriter::new(create(&path)?), path))
        }
        None => None,
    };
    let mut votes = LabelVotes::default();
    let mut matches: Vec<FrameMatch> = Vec::new();
    let mut all_gt = true;
    let mut samples: [Vec<f64>; 5] = Default::default();
    let mut n_frames = 0;
    let mut exported = 0;

    for frame in frames {
        let frame = frame?;
        let index = frame.input.index;
        let out = pipeline.process(frame.input);
        n_frames += 1;
        for (s, v) in samples.iter_mut().zip(out.times.as_array()) {
            s.push(v);
        }
        warnings.extend(out.warnings.iter().cloned());
        match &frame.ground_truth {
            Some(gt) => matches.push(match_frame(&out.reported, gt)),
            None => all_gt = false,
        }
        if let Some(w) = tracks.as_mut() {
            let line = TrackDumpLine {
                frame: index,
                components: out.components.clone(),
            };
            write_line(w, cfg.tracks_out.as_deref().expect("set"), &line)?;
        }
        if let (Some((w, path)), Some(labels)) = (export.as_mut(), frame.labels.as_ref()) {
            votes.add(&out, labels);
            if (index + 1) % cfg.export_every as u64 == 0 {
                for c in pipeline.filter().components() {
                    let Some(class) = votes.majority(c.id).and_then(|l| landmark_classes.get(&l)) else {
                        continue;
                    };
                    let Ok(sample) = sample_points(&c.accumulated_points, cfg.n_p, pipeline.sample_seed(index, c.id))
                    else {
                        continue;
                    };
                    let record = ComponentRecord {
                        frame: index,
                        component: c.id,
                        points: sample.points.iter().map(|p| [p.x, p.y, p.z, p.intensity]).collect(),
                        prior: c.class_scores.clone(),
                        true_class: *class,
                    };
                    write_line(w, path, &record)?;
                    exported += 1;
                }
            }
        }
    }
    if let Some(mut w) = tracks {
        w.flush().map_err(|source| IoError::Io {
            path: cfg.tracks_out.clone().expect("set"),
            source,
        })?;
    }
    if let Some((mut w, path)) = export {
        w.flush().map_err(|source| IoError::Io { path, source })?;
    }

    let runtime_ms: BTreeMap<String, StageStats> = STAGES
        .iter()
        .zip(&samples)
        .map(|(name, s)| (name.to_string(), StageStats::from_samples(s)))
        .collect();
    let degraded = pipeline.degraded_calls();
    if degraded > 0 {
        warnings.push(format!("{degraded} classifier calls fell back to the class prior"));
    }
    let metrics = all_gt.then(|| {
        let mut m = compute_metrics(&matches);
        m.runtime_ms = runtime_ms.clone();
        m.notes.extend(warnings.iter().take(20).cloned());
        m
    });
    if let Some(path) = &cfg.metrics_out {
        let report = metrics.clone().unwrap_or_else(|| MetricsReport {
            runtime_ms: runtime_ms.clone(),
            frames: n_frames,
            notes: vec!["no ground truth; detection metrics not computed".into()],
            ..Default::default()
        });
        crate::io::write_json(path, &report)?;
    }
    Ok(RunSummary {
        frames: n_frames,
        metrics,
        warnings,
        degraded_calls: degraded,
        exported_records: exported,
        runtime_ms,
    })
}

fn create(path: &Path) -> Result<fs::File, IoError> {
    fs::File::create(path).map_err(|source| IoError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write_line<T: Serialize>(w: &mut impl Write, path: &Path, value: &T) -> Result<(), IoError> {
    let mut line = serde_json::to_string(value).map_err(|e| IoError::Parse {
        path: path.to_path_buf(),
        msg: e.to_string(),
    })?;
    line.push('\n');
    w.write_all(line.as_bytes()).map_err(|source| IoError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Runs a simulated scenario. Frame generation is not timed.
pub fn run_scenario(cfg: &PipelineConfig, scenario: &Scenario) -> Result<RunSummary, PipelineError> {
    scenario.validate()?;
    let classes = scenario.world.landmarks.iter().map(|l| (l.id, l.class)).collect();
    let exec = cfg.execution;
    let frames = scenario.ego_poses().into_iter().enumerate().map(|(i, ego)| {
        let f = scenario.frame_at(i as u64, ego, exec);
        let instances = scenario
            .oversegment
            .map(|j| slab_instances(&f.rendered.cloud, &f.rendered.labels, j));
        Ok(SourceFrame {
            input: FrameInput {
                index: f.index,
                pose: f.sensor_pose,
                dt: if i == 0 { 0.0 } else { scenario.dt },
                cloud: f.rendered.cloud,
                detections: f.detector.detections,
                instances,
            },
            ground_truth: Some(f.ground_truth),
            labels: Some(f.rendered.labels),
        })
    });
    drive(cfg, &scenario.sensor.camera, frames, &classes)
}

/// Runs a recorded replay directory.
pub fn run_replay(cfg: &PipelineConfig, replay: &ReplayDir) -> Result<RunSummary, PipelineError> {
    let dt = replay.manifest.dt;
    let frames = replay.manifest.frames.iter().enumerate().map(|(i, entry)| {
        let f = replay.load_frame(entry)?;
        Ok(SourceFrame {
            input: FrameInput {
                index: f.index,
                pose: f.pose,
                dt: if i == 0 { 0.0 } else { dt },
                cloud: f.cloud,
                detections: f.detections,
                instances: None,
            },
            ground_truth: f.ground_truth,
            labels: None,
        })
    });
    drive(cfg, &replay.calibration, frames, &HashMap::new())
}

/// Runs whichever input the config names.
pub fn run(cfg: &PipelineConfig) -> Result<RunSummary, PipelineError> {
    match (&cfg.scenario, &cfg.replay) {
        (Some(path), None) => run_scenario(cfg, &Scenario::load(path)?),
        (None, Some(dir)) => run_replay(cfg, &ReplayDir::open(dir)?),
        _ => Err(PipelineError::Config("exactly one of scenario or replay is required".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simulator::{Bounds, WorldSpec};

    fn short_benchmark(n: usize) -> Scenario {
        let mut s = Scenario::benchmark(0).unwrap();
        s.n_frames = n;
        s
    }

    #[test]
    fn empty_world_runs() {
        let mut s = short_benchmark(5);
        s.world = WorldSpec {
            landmarks: vec![],
            bounds: Bounds {
                min: [-10.0, -10.0],
                max: [10.0, 10.0],
            },
            seed: 0,
        };
        let r = run_scenario(&PipelineConfig::default(), &s).unwrap();
        assert_eq!(r.frames, 5);
        let m = r.metrics.unwrap();
        assert!(m.class(LandmarkClass::Tree).recall.is_none());
        assert!(m.class(LandmarkClass::Bush).precision.is_none());
    }

    #[test]
    fn stage_times_bounded_by_total() {
        let s = short_benchmark(3);
        let mut p = Pipeline::new(&PipelineConfig::default(), &s.sensor.camera).unwrap();
        for (i, ego) in s.ego_poses().into_iter().enumerate() {
            let f = s.frame_at(i as u64, ego, Execution::Parallel);
            let out = p.process(FrameInput {
                index: i as u64,
                pose: f.sensor_pose,
                dt: if i == 0 { 0.0 } else { s.dt },
                cloud: f.rendered.cloud,
                detections: f.detector.detections,
                instances: None,
            });
            let t = out.times;
            let sum = t.clustering + t.proposal + t.tracking + t.classification;
            assert!(sum <= t.total * 1.05, "{t:?}");
            assert!(!out.components.is_empty());
        }
    }

    #[test]
    fn slab_instances_cover_labels() {
        let s = short_benchmark(1);
        let f = s.frame_at(0, s.ego_poses()[0], Execution::Parallel);
        let inst = slab_instances(&f.rendered.cloud, &f.rendered.labels, 3);
        assert_eq!(inst.len(), 30);
        let n: usize = inst.iter().map(|i| i.points.len()).sum();
        let objects = f.rendered.labels.iter().filter(|l| **l != PointLabel::Ground).count();
        assert_eq!(n, objects);
    }

    #[test]
    fn bad_tau_rejected() {
        let cfg = PipelineConfig {
            tau: 1.5,
            ..Default::default()
        };
        assert!(matches!(cfg.validate(), Err(PipelineError::Config(_))));
        let cfg = PipelineConfig {
            n_p: 700,
            ..Default::default()
        };
        assert_eq!(cfg.validate().unwrap().len(), 1);
    }
}
