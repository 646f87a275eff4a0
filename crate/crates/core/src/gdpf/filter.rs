use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::scoring::{association_posterior, cluster_prior, ddcrp_weight, LinkTarget};
use super::{
    idx, init_component, predict, update, Component, GdpfConfig, GdpfError, Measurement,
    StateCovariance, StateVector,
};
use crate::classes::ClassScores;
use crate::geometry::Box3D;

/// Exponential moving average of class scores, renormalized.
pub fn fuse_class(current: &ClassScores, incoming: &ClassScores, weight: f64) -> ClassScores {
    if current.len() != incoming.len() {
        return current.clone();
    }
    let w: Vec<f64> = current
        .as_slice()
        .iter()
        .zip(incoming.as_slice())
        .map(|(s, x)| (1.0 - weight) * s + weight * x)
        .collect();
    ClassScores::from_weights(w).unwrap_or_else(|_| current.clone())
}

/// Existence bookkeeping for one frame: additive boost on a hit,
/// geometric decay on a miss.
pub fn update_existence(c: &mut Component, hit: bool, cfg: &GdpfConfig) {
    if hit {
        c.existence = (c.existence + cfg.existence_hit).min(1.0);
        c.frames_since_hit = 0;
    } else {
        c.existence *= cfg.existence_miss_decay;
        c.frames_since_hit = c.frames_since_hit.saturating_add(1);
    }
}

/// Measurement-to-measurement link chosen for one measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Link {
    /// Self-link; the measurement opened a new component.
    Itself,
    /// Linked to an earlier measurement of this frame.
    Measurement(usize),
    /// Linked to the predicted pseudo-measurement of a component.
    Predicted(u64),
}

/// Result of greedy association for one frame.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct AssociationRecord {
    /// `assignments[i]` is the component id of measurement `i`.
    pub assignments: Vec<u64>,
    /// `links[i]` is the ddCRP link of measurement `i`.
    pub links: Vec<Option<Link>>,
    /// Ids created this frame, in creation order.
    pub new_ids: Vec<u64>,
    /// Order in which measurements were processed.
    pub order: Vec<usize>,
}

impl AssociationRecord {
    /// Measurement indices per component id.
    pub fn groups(&self) -> BTreeMap<u64, Vec<usize>> {
        let mut out: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
        for (i, k) in self.assignments.iter().enumerate() {
            out.entry(*k).or_default().push(i);
        }
        out
    }
}

/// Processing order: descending box volume, ties by index.
pub(crate) fn processing_order(measurements: &[Measurement]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..measurements.len()).collect();
    order.sort_by(|&a, &b| {
        measurements[b]
            .bbox
            .volume()
            .total_cmp(&measurements[a].bbox.volume())
            .then(a.cmp(&b))
    });
    order
}

struct Candidate<'a> {
    id: u64,
    /// Predicted component; `None` for components born this frame.
    existing: Option<&'a Component>,
    assigned: Vec<usize>,
    merged: Option<Box3D>,
    pseudo: Option<Box3D>,
}

impl Candidate<'_> {
    /// State and covariance the cluster prior is evaluated against.
    fn prior_state(&self, cfg: &GdpfConfig) -> (StateVector, StateCovariance) {
        match self.existing {
            Some(c) => (c.state.0, c.cov),
            None => {
                let b = self.merged.expect("newborn candidates carry a box");
                let mut s = StateVector::zeros();
                s[idx::X] = b.center[0];
                s[idx::Y] = b.center[1];
                s[idx::L] = b.dims[0].max(cfg.min_dimension);
                s[idx::W] = b.dims[1].max(cfg.min_dimension);
                let mut p = StateCovariance::zeros();
                let v = cfg.init_cov_inflation * cfg.meas_std_dimension.powi(2);
                p[(idx::L, idx::L)] = v;
                p[(idx::W, idx::W)] = v;
                (s, p)
            }
        }
    }
}

/// Greedy sequential association of one frame's measurements.
///
/// Measurements are visited in descending box volume. For each, every
/// existing component and every component born earlier in the frame is
/// scored by `ddCRP link weight x cluster prior`, alongside one new slot
/// with weight `alpha`; the argmax wins (ties go to the lower id, the new
/// slot loses ties). A component links to its latest measurement of this
/// frame, or to the pseudo-measurement of its predicted box. Components
/// born this frame evaluate the prior against the union of their
/// measurements.
///
/// `components` must already be predicted to the frame time. `next_id` is
/// advanced for each new component.
pub fn associate_greedy(
    measurements: &[Measurement],
    components: &[Component],
    cfg: &GdpfConfig,
    next_id: &mut u64,
) -> AssociationRecord {
    let mut cands: Vec<Candidate> = components
        .iter()
        .map(|c| Candidate {
            id: c.id,
            existing: Some(c),
            assigned: Vec::new(),
            merged: None,
            pseudo: Some(c.bbox()),
        })
        .collect();
    cands.sort_by_key(|c| c.id);

    let order = processing_order(measurements);
    let mut record = AssociationRecord {
        assignments: vec![u64::MAX; measurements.len()],
        links: vec![None; measurements.len()],
        new_ids: Vec::new(),
        order: order.clone(),
    };
    let mut weights = Vec::with_capacity(cands.len() + 1);
    for &i in &order {
        let y = &measurements[i];
        let ci = y.center();
        weights.clear();
        for cand in &cands {
            let target = match cand.assigned.last() {
                Some(&m) => &measurements[m].bbox,
                None => cand.pseudo.as_ref().expect("unassigned candidates are predicted"),
            };
            let (s, p) = cand.prior_state(cfg);
            let pi = cluster_prior(&s, &p, ci[0], ci[1]);
            weights.push(ddcrp_weight(ci, LinkTarget::Other(target), cfg.alpha) * pi);
        }
        weights.push(ddcrp_weight(ci, LinkTarget::Itself, cfg.alpha));
        let posterior = association_posterior(&weights);
        let mut best = 0;
        for (j, p) in posterior.iter().enumerate() {
            if *p > posterior[best] {
                best = j;
            }
        }
        if best == cands.len() {
            let id = *next_id;
            *next_id += 1;
            record.new_ids.push(id);
            record.links[i] = Some(Link::Itself);
            cands.push(Candidate {
                id,
                existing: None,
                assigned: vec![i],
                merged: Some(y.bbox),
                pseudo: None,
            });
            record.assignments[i] = id;
        } else {
            let cand = &mut cands[best];
            record.links[i] = Some(match cand.assigned.last() {
                Some(&m) => Link::Measurement(m),
                None => Link::Predicted(cand.id),
            });
            cand.assigned.push(i);
            cand.merged = Some(match cand.merged {
                Some(b) => b.union(&y.bbox),
                None => y.bbox,
            });
            record.assignments[i] = cand.id;
        }
    }
    record
}

/// Public view of one component after a frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrackedComponent {
    pub id: u64,
    pub state: [f64; 9],
    pub existence: f64,
    pub class_scores: ClassScores,
    /// `[cx, cy, cz, l, w, h]`
    #[serde(rename = "box")]
    pub bbox: [f64; 6],
}

impl TrackedComponent {
    pub fn from_component(c: &Component) -> Self {
        let b = c.bbox();
        Self {
            id: c.id,
            state: c.state.to_array(),
            existence: c.existence,
            class_scores: c.class_scores.clone(),
            bbox: [b.center[0], b.center[1], b.center[2], b.dims[0], b.dims[1], b.dims[2]],
        }
    }

    pub fn box3d(&self) -> Box3D {
        Box3D {
            center: [self.bbox[0], self.bbox[1], self.bbox[2]],
            dims: [self.bbox[3], self.bbox[4], self.bbox[5]],
        }
    }
}

/// Output of one filter step.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameResult {
    pub frame_index: u64,
    pub components: Vec<TrackedComponent>,
    pub association: AssociationRecord,
    /// Components whose update had to be re-initialized.
    pub warnings: Vec<GdpfError>,
}

/// The filter state machine. `step` must be called once per frame, in order.
#[derive(Debug, Clone)]
pub struct Gdpf {
    cfg: GdpfConfig,
    components: Vec<Component>,
    next_id: u64,
    frames: u64,
}

impl Gdpf {
    pub fn new(cfg: GdpfConfig) -> Result<Self, GdpfError> {
        cfg.validate()?;
        Ok(Self {
            cfg,
            components: Vec::new(),
            next_id: 0,
            frames: 0,
        })
    }

    pub fn config(&self) -> &GdpfConfig {
        &self.cfg
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn component_mut(&mut self, id: u64) -> Option<&mut Component> {
        self.components.iter_mut().find(|c| c.id == id)
    }

    /// Fuses an externally computed classification into a component.
    pub fn apply_classification(&mut self, id: u64, scores: &ClassScores) {
        let w = self.cfg.class_fusion_weight;
        if let Some(c) = self.component_mut(id) {
            c.class_scores = fuse_class(&c.class_scores, scores, w);
        }
    }

    /// Predict, associate, update, bookkeep existence and prune.
    pub fn step(&mut self, frame: &[Measurement], dt: f64) -> FrameResult {
        let cfg = &self.cfg;
        if dt > 0.0 {
            for c in &mut self.components {
                *c = predict(c, dt, cfg);
            }
        }
        let record = associate_greedy(frame, &self.components, cfg, &mut self.next_id);
        let groups = record.groups();
        let mut warnings = Vec::new();

        for c in &mut self.components {
            let hit = match groups.get(&c.id) {
                Some(members) => {
                    let parts: Vec<&Measurement> = members.iter().map(|&i| &frame[i]).collect();
                    let merged = Measurement::merge(&parts);
                    if let Err(e) = update(c, &merged, cfg) {
                        log::warn!("{e}; component re-initialized");
                        warnings.push(e);
                    }
                    true
                }
                None => false,
            };
            update_existence(c, hit, cfg);
        }
        for id in &record.new_ids {
            let parts: Vec<&Measurement> = groups[id].iter().map(|&i| &frame[i]).collect();
            let mut c = init_component(*id, &Measurement::merge(&parts), cfg);
            update_existence(&mut c, true, cfg);
            self.components.push(c);
        }
        let prune = cfg.existence_prune;
        self.components.retain(|c| c.existence >= prune);
        self.components.sort_by_key(|c| c.id);

        let frame_index = self.frames;
        self.frames += 1;
        FrameResult {
            frame_index,
            components: self.components.iter().map(TrackedComponent::from_component).collect(),
            association: record,
            warnings,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Point4;

    fn meas(i: usize, center: [f64; 3], dims: [f64; 3]) -> Measurement {
        Measurement {
            bbox: Box3D::new(center, dims).unwrap(),
            class_proposal: ClassScores::uniform(2),
            points: vec![Point4::new(center[0], center[1], center[2], 0.5)],
            frame_index: 0,
            index_in_frame: i,
        }
    }

    #[test]
    fn existence_arithmetic() {
        let cfg = GdpfConfig { existence_hit: 0.2, existence_miss_decay: 0.9, ..Default::default() };
        let mut c = init_component(0, &meas(0, [0.0; 3], [1.0; 3]), &cfg);
        c.existence = 0.5;
        update_existence(&mut c, true, &cfg);
        assert!((c.existence - 0.7).abs() < 1e-12);
        c.existence = 0.8;
        for _ in 0..3 {
            update_existence(&mut c, false, &cfg);
        }
        assert!((c.existence - 0.5832).abs() < 1e-12);
        assert_eq!(c.frames_since_hit, 3);
    }

    #[test]
    fn fuse_class_rules() {
        let a = ClassScores::from_weights(vec![0.6, 0.3, 0.1]).unwrap();
        let b = ClassScores::one_hot(2, 1);
        let same = fuse_class(&a, &a, 0.3);
        for (x, y) in same.as_slice().iter().zip(a.as_slice()) {
            assert!((x - y).abs() < 1e-12);
        }
        assert_eq!(fuse_class(&a, &b, 1.0), b);
        assert!(fuse_class(&a, &b, 0.3).is_normalized());
    }

    #[test]
    fn lone_component_absorbs_inside_measurement() {
        let cfg = GdpfConfig::default();
        let comp = init_component(3, &meas(0, [0.0, 0.0, 1.0], [2.0, 2.0, 2.0]), &cfg);
        let mut next = 4;
        let rec = associate_greedy(&[meas(0, [0.1, 0.0, 1.0], [1.0; 3])], &[comp], &cfg, &mut next);
        assert_eq!(rec.assignments, vec![3]);
        assert_eq!(rec.links[0], Some(Link::Predicted(3)));
        assert!(rec.new_ids.is_empty());
    }

    #[test]
    fn far_measurement_opens_component() {
        let cfg = GdpfConfig::default();
        let comp = init_component(0, &meas(0, [0.0, 0.0, 1.0], [2.0, 2.0, 2.0]), &cfg);
        let mut next = 1;
        let rec = associate_greedy(&[meas(0, [15.0, 0.0, 1.0], [1.0; 3])], &[comp], &cfg, &mut next);
        assert_eq!(rec.assignments, vec![1]);
        assert_eq!(rec.new_ids, vec![1]);
        assert_eq!(next, 2);
    }

    #[test]
    fn zero_alpha_never_opens_with_candidates() {
        let cfg = GdpfConfig { alpha: 0.0, ..Default::default() };
        let comp = init_component(0, &meas(0, [0.0, 0.0, 1.0], [2.0, 2.0, 2.0]), &cfg);
        let mut next = 1;
        let far = [meas(0, [500.0, 0.0, 1.0], [1.0; 3])];
        let rec = associate_greedy(&far, &[comp], &cfg, &mut next);
        assert_eq!(rec.assignments, vec![0]);
        // no candidates: the new slot is the only option
        let rec = associate_greedy(&far, &[], &cfg, &mut next);
        assert_eq!(rec.new_ids.len(), 1);
    }

    #[test]
    fn empty_frame_decays() {
        let mut f = Gdpf::new(GdpfConfig::default()).unwrap();
        f.step(&[meas(0, [0.0, 0.0, 1.0], [1.0; 3])], 0.1);
        let before = f.components()[0].existence;
        let r = f.step(&[], 0.1);
        assert_eq!(r.components.len(), 1);
        assert!((r.components[0].existence - before * 0.9).abs() < 1e-12);
    }

    #[test]
    fn unhit_component_is_pruned() {
        let mut f = Gdpf::new(GdpfConfig::default()).unwrap();
        f.step(&[meas(0, [0.0, 0.0, 1.0], [1.0; 3])], 0.1);
        let mut frames = 0;
        while !f.components().is_empty() {
            f.step(&[], 0.1);
            frames += 1;
            assert!(frames < 100);
        }
        // 0.55 * 0.9^n < 0.05
        assert_eq!(frames, 23);
    }

    #[test]
    fn over_segmented_slabs_share_one_component() {
        let mut f = Gdpf::new(GdpfConfig::default()).unwrap();
        let slabs = [
            meas(0, [-1.0, 0.0, 1.0], [1.0, 3.0, 2.0]),
            meas(1, [0.0, 0.0, 1.0], [1.0, 3.0, 2.0]),
            meas(2, [1.0, 0.0, 1.0], [1.0, 3.0, 2.0]),
        ];
        for _ in 0..10 {
            let r = f.step(&slabs, 0.1);
            assert_eq!(r.components.len(), 1);
        }
        let b = f.components()[0].bbox();
        assert!((b.dims[0] - 3.0).abs() < 0.1, "{:?}", b);
    }
}
