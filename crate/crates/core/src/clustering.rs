//! Ground removal and Euclidean instance clustering.
//!
//! The segmenter links two points when they lie within `radius` of each
//! other and reports the connected components. A uniform voxel grid with
//! cell size `radius` limits the neighbor search to the 27 surrounding
//! cells.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::classes::ClassScores;
use crate::geometry::{Box3D, Point4};

/// Boxes never collapse below this extent (meters) on any axis.
pub const MIN_BOX_EXTENT: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ClusteringConfig {
    /// x-y cell size for ground removal.
    pub ground_cell: f64,
    /// Points within this height above their cell's lowest point are ground.
    pub z_margin: f64,
    /// Linkage distance.
    pub radius: f64,
    /// Components with fewer points are dropped.
    pub min_points: usize,
}

impl Default for ClusteringConfig {
    fn default() -> Self {
        Self {
            ground_cell: 0.5,
            z_margin: 0.3,
            radius: 0.5,
            min_points: 10,
        }
    }
}

/// A clustered subset of one frame's cloud.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance3D {
    /// Frame-local id, equal to the instance's position in the output list.
    pub id: usize,
    pub points: Vec<Point4>,
    /// Indices of `points` in the cloud that was clustered.
    pub indices: Vec<usize>,
    pub bbox: Box3D,
    pub class_proposal: Option<ClassScores>,
}

impl Instance3D {
    /// Builds an instance from points, bounding them tightly.
    pub fn from_points(id: usize, points: Vec<Point4>, indices: Vec<usize>) -> Option<Self> {
        let bbox = Box3D::bounding(&points, MIN_BOX_EXTENT)?;
        Some(Self {
            id,
            points,
            indices,
            bbox,
            class_proposal: None,
        })
    }
}

fn cell_2d(p: &Point4, cell: f64) -> (i64, i64) {
    ((p.x / cell).floor() as i64, (p.y / cell).floor() as i64)
}

/// Indices of the points that survive ground removal, in input order.
pub fn remove_ground_indices(cloud: &[Point4], cell: f64, z_margin: f64) -> Vec<usize> {
    assert!(cell > 0.0, "ground cell size must be positive");
    let mut floor: HashMap<(i64, i64), f64> = HashMap::with_capacity(cloud.len() / 8 + 1);
    for p in cloud {
        floor
            .entry(cell_2d(p, cell))
            .and_modify(|z| *z = z.min(p.z))
            .or_insert(p.z);
    }
    cloud
        .iter()
        .enumerate()
        .filter(|(_, p)| p.z >= floor[&cell_2d(p, cell)] + z_margin)
        .map(|(i, _)| i)
        .collect()
}

/// Drops every point lower than `z_margin` above the lowest point of its
/// x-y cell.
pub fn remove_ground(cloud: &[Point4], cell: f64, z_margin: f64) -> Vec<Point4> {
    remove_ground_indices(cloud, cell, z_margin)
        .into_iter()
        .map(|i| cloud[i])
        .collect()
}

/// Union-find with path halving and union by size.
#[derive(Debug, Clone)]
pub struct DisjointSets {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl DisjointSets {
    pub fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub fn union(&mut self, a: usize, b: usize) {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
    }
}

type Voxel = (i64, i64, i64);

fn voxel(p: &Point4, cell: f64) -> Voxel {
    (
        (p.x / cell).floor() as i64,
        (p.y / cell).floor() as i64,
        (p.z / cell).floor() as i64,
    )
}

/// Groups point indices into connected components under the `radius`
/// linkage. Components are returned with ascending indices, in order of
/// their smallest index.
pub fn connected_components(cloud: &[Point4], radius: f64) -> Vec<Vec<usize>> {
    assert!(radius > 0.0, "cluster radius must be positive");
    let r2 = radius * radius;
    let mut grid: HashMap<Voxel, Vec<usize>> = HashMap::with_capacity(cloud.len() / 4 + 1);
    for (i, p) in cloud.iter().enumerate() {
        grid.entry(voxel(p, radius)).or_default().push(i);
    }
    let mut sets = DisjointSets::new(cloud.len());
    for (&(vx, vy, vz), members) in &grid {
        for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    let key = (vx + dx, vy + dy, vz + dz);
                    // visit each unordered pair of voxels once
                    if key < (vx, vy, vz) {
                        continue;
                    }
                    let Some(others) = grid.get(&key) else {
                        continue;
                    };
                    let same = key == (vx, vy, vz);
                    for (ai, &a) in members.iter().enumerate() {
                        let pa = &cloud[a];
                        let start = if same { ai + 1 } else { 0 };
                        for &b in &others[start..] {
                            let pb = &cloud[b];
                            let d2 = (pa.x - pb.x).powi(2)
                                + (pa.y - pb.y).powi(2)
                                + (pa.z - pb.z).powi(2);
                            if d2 <= r2 {
                                sets.union(a, b);
                            }
                        }
                    }
                }
            }
        }
    }
    let mut by_root: HashMap<usize, usize> = HashMap::new();
    let mut comps: Vec<Vec<usize>> = Vec::new();
    for i in 0..cloud.len() {
        let root = sets.find(i);
        let slot = *by_root.entry(root).or_insert_with(|| {
            comps.push(Vec::new());
            comps.len() - 1
        });
        comps[slot].push(i);
    }
    comps
}

/// Euclidean clustering. Components smaller than `min_points` are dropped;
/// the rest are ordered by the (min x, min y) corner of their bound and
/// numbered in that order.
pub fn cluster(cloud: &[Point4], radius: f64, min_points: usize) -> Vec<Instance3D> {
    assert!(min_points >= 1, "min_points must be at least 1");
    let mut instances: Vec<Instance3D> = connected_components(cloud, radius)
        .into_iter()
        .filter(|c| c.len() >= min_points)
        .filter_map(|indices| {
            let points = indices.iter().map(|&i| cloud[i]).collect();
            Instance3D::from_points(0, points, indices)
        })
        .collect();
    instances.sort_by(|a, b| {
        let (ma, mb) = (a.bbox.min(), b.bbox.min());
        ma[0]
            .total_cmp(&mb[0])
            .then(ma[1].total_cmp(&mb[1]))
            .then(a.indices[0].cmp(&b.indices[0]))
    });
    for (id, inst) in instances.iter_mut().enumerate() {
        inst.id = id;
    }
    instances
}

/// Ground removal followed by clustering; instance indices refer to `cloud`.
pub fn segment(cloud: &[Point4], cfg: &ClusteringConfig) -> Vec<Instance3D> {
    let kept = remove_ground_indices(cloud, cfg.ground_cell, cfg.z_margin);
    let above: Vec<Point4> = kept.iter().map(|&i| cloud[i]).collect();
    let mut instances = cluster(&above, cfg.radius, cfg.min_points);
    for inst in &mut instances {
        for idx in &mut inst.indices {
            *idx = kept[*idx];
        }
    }
    instances
}
