//! Independent reference implementations and scenario builders shared by
//! the integration tests and the acceptance suite.
#![allow(dead_code, clippy::too_many_arguments)]

use landmark_core::classes::{ClassScores, LandmarkClass};
use landmark_core::gdpf::{idx, init_component, Component, Gdpf, GdpfConfig, Measurement};
use landmark_core::geometry::{Box3D, Point4, Pose};
use landmark_core::simulator::{
    Bounds, CameraSpec, DetectorSpec, DropoutWindow, Landmark, Scenario, SensorSpec, TrajectoryKind,
    TrajectorySpec, Trunk, WorldSpec,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

// ---------------------------------------------------------------- scores

/// Signed distance to each of the six bounded faces, maximized: positive
/// perpendicular depth when strictly inside, otherwise minus the distance
/// to the nearest point of the face rectangle.
pub fn oracle_max_signed_distance(c: [f64; 3], b: &Box3D) -> f64 {
    let lo: Vec<f64> = (0..3).map(|a| b.center[a] - b.dims[a] / 2.0).collect();
    let hi: Vec<f64> = (0..3).map(|a| b.center[a] + b.dims[a] / 2.0).collect();
    let inside = (0..3).all(|a| c[a] > lo[a] && c[a] < hi[a]);
    let mut best = f64::NEG_INFINITY;
    for axis in 0..3 {
        for plane in [lo[axis], hi[axis]] {
            let v = if inside {
                (c[axis] - plane).abs()
            } else {
                let mut d2 = (c[axis] - plane).powi(2);
                for other in (0..3).filter(|&o| o != axis) {
                    let clamped = c[other].max(lo[other]).min(hi[other]);
                    d2 += (c[other] - clamped).powi(2);
                }
                -d2.sqrt()
            };
            best = best.max(v);
        }
    }
    best
}

pub fn oracle_relation(phi: f64) -> f64 {
    1.0 / (1.0 + (-0.75 * (phi + 1.0)).exp())
}

/// exp(-(dx^2 / (l + sqrt(P_ll)) + dy^2 / (w + sqrt(P_ww))))
pub fn oracle_prior(x: f64, y: f64, l: f64, w: f64, p_ll: f64, p_ww: f64, mx: f64, my: f64) -> f64 {
    let a = l + p_ll.sqrt();
    let b = w + p_ww.sqrt();
    (-((x - mx).powi(2) / a + (y - my).powi(2) / b)).exp()
}

// ----------------------------------------------------------- association

/// A component as the association oracle sees it.
#[derive(Debug, Clone)]
pub struct OracleComponent {
    pub id: u64,
    pub x: f64,
    pub y: f64,
    pub l: f64,
    pub w: f64,
    pub p_ll: f64,
    pub p_ww: f64,
    /// Box implied by the predicted state.
    pub bbox: Box3D,
}

impl OracleComponent {
    pub fn from_component(c: &Component) -> Self {
        let s = &c.state.0;
        Self {
            id: c.id,
            x: s[idx::X],
            y: s[idx::Y],
            l: s[idx::L],
            w: s[idx::W],
            p_ll: c.cov[(idx::L, idx::L)],
            p_ww: c.cov[(idx::W, idx::W)],
            bbox: c.bbox(),
        }
    }
}

/// Exhaustive sequential-argmax association. At every step the full
/// normalized distribution over all candidates is computed and its argmax
/// taken (first maximum in candidate order wins).
pub fn oracle_associate(boxes: &[Box3D], comps: &[OracleComponent], cfg: &GdpfConfig) -> Vec<u64> {
    let mut order: Vec<usize> = (0..boxes.len()).collect();
    // stable sort keeps index order among equal volumes
    order.sort_by(|&a, &b| {
        let va = boxes[a].dims[0] * boxes[a].dims[1] * boxes[a].dims[2];
        let vb = boxes[b].dims[0] * boxes[b].dims[1] * boxes[b].dims[2];
        vb.partial_cmp(&va).unwrap()
    });

    // (id, Some(existing) | None, assigned measurement indices)
    let mut existing: Vec<&OracleComponent> = comps.iter().collect();
    existing.sort_by_key(|c| c.id);
    let mut members: Vec<(u64, Option<&OracleComponent>, Vec<usize>)> =
        existing.iter().map(|c| (c.id, Some(*c), Vec::new())).collect();
    let mut next_id = comps.iter().map(|c| c.id + 1).max().unwrap_or(0);
    let mut out = vec![u64::MAX; boxes.len()];
    let dim_var = cfg.init_cov_inflation * cfg.meas_std_dimension * cfg.meas_std_dimension;

    for &i in &order {
        let c = boxes[i].center;
        let mut weights = Vec::new();
        for (_, comp, assigned) in &members {
            let link_box = match assigned.last() {
                Some(&m) => boxes[m],
                None => comp.unwrap().bbox,
            };
            let d = oracle_relation(oracle_max_signed_distance(c, &link_box));
            let pi = match comp {
                Some(k) => oracle_prior(k.x, k.y, k.l, k.w, k.p_ll, k.p_ww, c[0], c[1]),
                None => {
                    let mut u = boxes[assigned[0]];
                    for &m in &assigned[1..] {
                        u = u.union(&boxes[m]);
                    }
                    oracle_prior(
                        u.center[0],
                        u.center[1],
                        u.dims[0].max(cfg.min_dimension),
                        u.dims[1].max(cfg.min_dimension),
                        dim_var,
                        dim_var,
                        c[0],
                        c[1],
                    )
                }
            };
            weights.push(d * pi);
        }
        weights.push(cfg.alpha);
        let total: f64 = weights.iter().sum();
        let probs: Vec<f64> = if total > 0.0 {
            weights.iter().map(|w| w / total).collect()
        } else {
            vec![1.0 / weights.len() as f64; weights.len()]
        };
        let mut best = 0;
        for j in 1..probs.len() {
            if probs[j] > probs[best] {
                best = j;
            }
        }
        if best == members.len() {
            members.push((next_id, None, vec![i]));
            out[i] = next_id;
            next_id += 1;
        } else {
            members[best].2.push(i);
            out[i] = members[best].0;
        }
    }
    out
}

pub fn measurement(bbox: Box3D, index: usize) -> Measurement {
    Measurement {
        bbox,
        class_proposal: ClassScores::uniform(LandmarkClass::COUNT),
        points: vec![Point4::new(bbox.center[0], bbox.center[1], bbox.center[2], 0.5)],
        frame_index: 0,
        index_in_frame: index,
    }
}

/// Random association instance: up to 4 measurements and 3 components
/// packed into a few meters so that links genuinely compete.
pub fn random_association_case(rng: &mut ChaCha8Rng) -> (Vec<Measurement>, Vec<Component>) {
    let cfg = GdpfConfig::default();
    let rand_box = |rng: &mut ChaCha8Rng| {
        Box3D::new(
            [rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0), rng.random_range(0.0..2.0)],
            [rng.random_range(0.2..3.0), rng.random_range(0.2..3.0), rng.random_range(0.2..3.0)],
        )
        .unwrap()
    };
    let n_meas = rng.random_range(1..=4);
    let n_comp = rng.random_range(0..=3);
    let meas: Vec<Measurement> = (0..n_meas).map(|i| measurement(rand_box(rng), i)).collect();
    let mut ids: Vec<u64> = (0..10).collect();
    let comps = (0..n_comp)
        .map(|k| {
            let last = ids.len() - 1 - k;
            let pick = rng.random_range(0..=last);
            ids.swap(pick, last);
            let id = ids[last];
            let mut c = init_component(id, &measurement(rand_box(rng), 0), &cfg);
            c.cov[(idx::L, idx::L)] = rng.random_range(0.0..1.0);
            c.cov[(idx::W, idx::W)] = rng.random_range(0.0..1.0);
            c
        })
        .collect();
    (meas, comps)
}

// ------------------------------------------------------------ clustering

/// O(n^2) union-find connectivity, normalized: members ascending, groups
/// ordered by smallest member.
pub fn brute_force_components(points: &[Point4], radius: f64) -> Vec<Vec<usize>> {
    let n = points.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            x = p[x];
        }
        x
    }
    for i in 0..n {
        for j in i + 1..n {
            let (a, b) = (&points[i], &points[j]);
            let d2 = (a.x - b.x).powi(2) + (a.y - b.y).powi(2) + (a.z - b.z).powi(2);
            if d2 <= radius * radius {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri.max(rj)] = ri.min(rj);
                }
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for i in 0..n {
        let r = find(&mut parent, i);
        groups.entry(r).or_default().push(i);
    }
    normalize_groups(groups.into_values().collect())
}

pub fn normalize_groups(mut g: Vec<Vec<usize>>) -> Vec<Vec<usize>> {
    for v in &mut g {
        v.sort_unstable();
    }
    g.sort_by_key(|v| v[0]);
    g
}

/// Blobs of points, some on a coarse lattice so pairs at exactly the
/// linkage distance occur.
pub fn random_cloud(rng: &mut ChaCha8Rng, max_points: usize) -> Vec<Point4> {
    let n = rng.random_range(1..=max_points);
    let n_blobs = rng.random_range(1..=8);
    let centers: Vec<[f64; 3]> = (0..n_blobs)
        .map(|_| [rng.random_range(-10.0..10.0), rng.random_range(-10.0..10.0), rng.random_range(0.0..3.0)])
        .collect();
    (0..n)
        .map(|_| {
            let c = centers[rng.random_range(0..n_blobs)];
            let spread = 1.5;
            let mut p = [
                c[0] + rng.random_range(-spread..spread),
                c[1] + rng.random_range(-spread..spread),
                c[2] + rng.random_range(-spread..spread),
            ];
            if rng.random_bool(0.3) {
                for v in &mut p {
                    *v = (*v * 4.0).round() / 4.0;
                }
            }
            Point4::new(p[0], p[1], p[2], 0.5)
        })
        .collect()
}

// -------------------------------------------------------------- filtering

/// Static landmark observed for `frames` frames with Gaussian box noise.
/// Returns the final x-y error and the smallest covariance eigenvalue seen.
pub fn static_track_run(seed: u64, frames: usize, noise: f64, dt: f64) -> ([f64; 2], f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let truth = [rng.random_range(-20.0..20.0), rng.random_range(-20.0..20.0), 1.5];
    let dims = [2.0, 2.0, 3.0];
    let n = Normal::new(0.0, noise).unwrap();
    let mut f = Gdpf::new(GdpfConfig::default()).unwrap();
    let mut min_eig = f64::INFINITY;
    for t in 0..frames {
        let c = [truth[0] + n.sample(&mut rng), truth[1] + n.sample(&mut rng), truth[2] + n.sample(&mut rng)];
        let d = [dims[0] + n.sample(&mut rng), dims[1] + n.sample(&mut rng), dims[2] + n.sample(&mut rng)];
        let y = measurement(Box3D::new(c, d).unwrap(), 0);
        f.step(&[y], if t == 0 { 0.0 } else { dt });
        assert_eq!(f.components().len(), 1, "static target split at frame {t}");
        let p = f.components()[0].cov;
        min_eig = min_eig.min(p.symmetric_eigen().eigenvalues.min());
    }
    let pos = f.components()[0].state.position();
    ([pos[0] - truth[0], pos[1] - truth[1]], min_eig)
}

// -------------------------------------------------------------- scenarios

pub fn lone_world(l: Landmark) -> WorldSpec {
    WorldSpec {
        landmarks: vec![l],
        bounds: Bounds {
            min: [-60.0, -60.0],
            max: [60.0, 60.0],
        },
        seed: 11,
    }
}

pub fn bush_at(x: f64, y: f64) -> Landmark {
    Landmark {
        id: 0,
        class: LandmarkClass::Bush,
        position: [x, y],
        canopy: [2.5, 2.5, 1.2],
        base: landmark_core::simulator::BASE_CLEARANCE,
        trunk: None,
    }
}

pub fn tree_at(x: f64, y: f64) -> Landmark {
    Landmark {
        id: 0,
        class: LandmarkClass::Tree,
        position: [x, y],
        canopy: [3.0, 3.0, 5.0],
        base: landmark_core::simulator::BASE_CLEARANCE,
        trunk: Some(Trunk {
            diameter: 0.3,
            height: 1.5,
        }),
    }
}

/// One landmark ahead of a slowly moving ego, forward camera.
pub fn single_landmark_scenario(l: Landmark, n_frames: usize) -> Scenario {
    Scenario {
        world: lone_world(l),
        sensor: SensorSpec {
            camera: CameraSpec::pinhole_facing(0.0),
            ..Default::default()
        },
        detector: DetectorSpec {
            detection_prob: 1.0,
            ..Default::default()
        },
        trajectory: TrajectorySpec {
            kind: TrajectoryKind::Straight,
            start: Pose::default(),
            speed: 2.0,
        },
        n_frames,
        dt: 0.1,
        oversegment: None,
    }
}

/// Bush detected in frames 1-10 only; 2D detections drop out in 11-30.
pub fn dropout_scenario() -> Scenario {
    let mut s = single_landmark_scenario(bush_at(20.0, 1.0), 31);
    s.detector.dropouts = vec![
        DropoutWindow {
            landmark: 0,
            first_frame: 0,
            last_frame: 0,
        },
        DropoutWindow {
            landmark: 0,
            first_frame: 11,
            last_frame: 30,
        },
    ];
    s
}

/// Tree emitted as three vertical slabs per frame for 20 frames.
pub fn oversegment_scenario() -> Scenario {
    let mut s = single_landmark_scenario(tree_at(15.0, 0.0), 20);
    s.oversegment = Some(3);
    s
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
