//! Detection metrics: true-positive matching, precision/recall, x-y RMSE,
//! mean 3D overlap and per-stage runtime statistics.
//!
//! A reported box is a true positive for a ground-truth box when the classes
//! agree and the ground-truth box contains the reported box's center.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::classes::LandmarkClass;
use crate::geometry::{overlap_3d, Box3D};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroundTruthBox {
    pub frame: u64,
    pub landmark: u64,
    pub class: LandmarkClass,
    #[serde(rename = "box")]
    pub bbox: Box3D,
}

/// One box reported by the pipeline for a frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReportedBox {
    pub id: u64,
    pub class: LandmarkClass,
    #[serde(rename = "box")]
    pub bbox: Box3D,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruePositive {
    pub det: usize,
    pub gt: usize,
    pub class: LandmarkClass,
    /// Reported minus ground-truth center, x and y.
    pub err_xy: [f64; 2],
    pub overlap: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct FrameMatch {
    pub true_positives: Vec<TruePositive>,
    /// Unmatched detections with their reported class.
    pub false_positives: Vec<(usize, LandmarkClass)>,
    /// Unmatched ground truth with its class.
    pub false_negatives: Vec<(usize, LandmarkClass)>,
}

fn dist2_xyz(a: [f64; 3], b: [f64; 3]) -> f64 {
    (0..3).map(|i| (a[i] - b[i]).powi(2)).sum()
}

/// Matches one frame. Eligible (ground truth, detection) pairs are taken
/// greedily by increasing center distance; each side is used at most once.
pub fn match_frame(dets: &[ReportedBox], gts: &[GroundTruthBox]) -> FrameMatch {
    let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
    for (g, gt) in gts.iter().enumerate() {
        for (d, det) in dets.iter().enumerate() {
            if det.class == gt.class && gt.bbox.contains(det.bbox.center) {
                pairs.push((dist2_xyz(det.bbox.center, gt.bbox.center), g, d));
            }
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));

    let mut gt_used = vec![false; gts.len()];
    let mut det_used = vec![false; dets.len()];
    let mut out = FrameMatch::default();
    for (_, g, d) in pairs {
        if gt_used[g] || det_used[d] {
            continue;
        }
        gt_used[g] = true;
        det_used[d] = true;
        let (dc, gc) = (dets[d].bbox.center, gts[g].bbox.center);
        out.true_positives.push(TruePositive {
            det: d,
            gt: g,
            class: gts[g].class,
            err_xy: [dc[0] - gc[0], dc[1] - gc[1]],
            overlap: overlap_3d(&dets[d].bbox, &gts[g].bbox),
        });
    }
    out.true_positives.sort_by_key(|tp| tp.gt);
    out.false_positives = (0..dets.len())
        .filter(|&d| !det_used[d])
        .map(|d| (d, dets[d].class))
        .collect();
    out.false_negatives = (0..gts.len())
        .filter(|&g| !gt_used[g])
        .map(|g| (g, gts[g].class))
        .collect();
    out
}

/// Per-class metrics. Ratios with an empty denominator are `None`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub recall: Option<f64>,
    pub precision: Option<f64>,
    pub rmse_xy: Option<f64>,
    pub mean_overlap: Option<f64>,
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct StageStats {
    pub mean: f64,
    pub p95: f64,
}

impl StageStats {
    /// Mean and nearest-rank 95th percentile. Empty input gives zeros.
    pub fn from_samples(samples: &[f64]) -> Self {
        if samples.is_empty() {
            return Self::default();
        }
        let mut sorted = samples.to_vec();
        sorted.sort_by(f64::total_cmp);
        let rank = ((0.95 * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len());
        Self {
            mean: sorted.iter().sum::<f64>() / sorted.len() as f64,
            p95: sorted[rank - 1],
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub per_class: BTreeMap<String, ClassMetrics>,
    pub runtime_ms: BTreeMap<String, StageStats>,
    /// Number of evaluated frames.
    pub frames: usize,
    pub notes: Vec<String>,
}

impl MetricsReport {
    pub fn class(&self, c: LandmarkClass) -> &ClassMetrics {
        &self.per_class[c.name()]
    }

    pub fn false_positives_per_frame(&self) -> Option<f64> {
        let fp: usize = self.per_class.values().map(|m| m.fp).sum();
        (self.frames > 0).then(|| fp as f64 / self.frames as f64)
    }
}

fn ratio(num: usize, den: usize) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

/// Aggregates matched frames into a report. Runtime stats are left empty.
pub fn compute_metrics(frames: &[FrameMatch]) -> MetricsReport {
    let mut report = MetricsReport {
        frames: frames.len(),
        notes: vec![
            "precision = tp / (tp + fp), recall = tp / (tp + fn)".into(),
            "rmse_xy and mean_overlap are computed over true positives only; z is ignored in rmse_xy".into(),
            "null marks a metric with an empty denominator".into(),
        ],
        ..Default::default()
    };
    for class in LandmarkClass::ALL {
        let tps: Vec<&TruePositive> = frames
            .iter()
            .flat_map(|f| &f.true_positives)
            .filter(|tp| tp.class == class)
            .collect();
        let fp = frames
            .iter()
            .flat_map(|f| &f.false_positives)
            .filter(|(_, c)| *c == class)
            .count();
        let fn_ = frames
            .iter()
            .flat_map(|f| &f.false_negatives)
            .filter(|(_, c)| *c == class)
            .count();
        let tp = tps.len();
        let rmse_xy = (tp > 0).then(|| {
            let sum: f64 = tps.iter().map(|t| t.err_xy[0].powi(2) + t.err_xy[1].powi(2)).sum();
            (sum / tp as f64).sqrt()
        });
        let mean_overlap = (tp > 0).then(|| tps.iter().map(|t| t.overlap).sum::<f64>() / tp as f64);
        report.per_class.insert(
            class.name().to_string(),
            ClassMetrics {
                recall: ratio(tp, tp + fn_),
                precision: ratio(tp, tp + fp),
                rmse_xy,
                mean_overlap,
                tp,
                fp,
                fn_,
            },
        );
    }
    report
}
