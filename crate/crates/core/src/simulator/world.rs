use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{stream_seed, streams, SimError};
use crate::classes::LandmarkClass;
use crate::geometry::Box3D;

/// Height of every landmark's lowest point above the ground plane (m).
/// Keeps object points clear of the ground-removal margin.
pub const BASE_CLEARANCE: f64 = 0.4;

/// Minimum horizontal gap between landmark footprints (m).
pub const MIN_SEPARATION: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Trunk {
    pub diameter: f64,
    /// From the landmark base to the canopy bottom.
    pub height: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Landmark {
    pub id: u64,
    pub class: LandmarkClass,
    /// Ground position of the vertical axis.
    pub position: [f64; 2],
    /// Canopy ellipsoid extents: diameter along x, diameter along y, height.
    pub canopy: [f64; 3],
    /// Height of the lowest point above ground.
    pub base: f64,
    #[serde(default)]
    pub trunk: Option<Trunk>,
}

/// Ellipsoid surface area (Thomsen's approximation, within about 1%).
pub(crate) fn ellipsoid_area(r: [f64; 3]) -> f64 {
    const P: f64 = 1.6075;
    let (a, b, c) = (r[0].powf(P), r[1].powf(P), r[2].powf(P));
    4.0 * std::f64::consts::PI * ((a * b + a * c + b * c) / 3.0).powf(1.0 / P)
}

impl Landmark {
    pub fn canopy_radii(&self) -> [f64; 3] {
        [0.5 * self.canopy[0], 0.5 * self.canopy[1], 0.5 * self.canopy[2]]
    }

    pub fn canopy_center(&self) -> [f64; 3] {
        let trunk = self.trunk.map_or(0.0, |t| t.height);
        [self.position[0], self.position[1], self.base + trunk + 0.5 * self.canopy[2]]
    }

    /// Top of the rendered trunk cylinder. It reaches the canopy center so
    /// trunk and canopy points connect.
    pub fn trunk_top(&self) -> f64 {
        self.canopy_center()[2]
    }

    pub fn height(&self) -> f64 {
        self.trunk.map_or(0.0, |t| t.height) + self.canopy[2]
    }

    /// Largest horizontal distance from the axis to the surface.
    pub fn footprint_radius(&self) -> f64 {
        let trunk = self.trunk.map_or(0.0, |t| 0.5 * t.diameter);
        (0.5 * self.canopy[0].max(self.canopy[1])).max(trunk)
    }

    /// World-frame bound of the whole landmark.
    pub fn bbox(&self) -> Box3D {
        let trunk_d = self.trunk.map_or(0.0, |t| t.diameter);
        Box3D {
            center: [self.position[0], self.position[1], self.base + 0.5 * self.height()],
            dims: [self.canopy[0].max(trunk_d), self.canopy[1].max(trunk_d), self.height()],
        }
    }

    pub fn canopy_area(&self) -> f64 {
        ellipsoid_area(self.canopy_radii())
    }

    /// Lateral area of the exposed trunk cylinder (below the canopy).
    pub fn trunk_area(&self) -> f64 {
        self.trunk
            .map_or(0.0, |t| std::f64::consts::PI * t.diameter * (self.trunk_top() - self.base))
    }

    /// Distance-like residual of a world point to the analytic surface:
    /// zero on the canopy ellipsoid or the trunk cylinder.
    pub fn surface_residual(&self, p: [f64; 3]) -> f64 {
        let c = self.canopy_center();
        let r = self.canopy_radii();
        let e: f64 = (0..3).map(|a| ((p[a] - c[a]) / r[a]).powi(2)).sum();
        let mut best = (e - 1.0).abs();
        if let Some(t) = self.trunk {
            let rho = (p[0] - self.position[0]).hypot(p[1] - self.position[1]);
            if p[2] >= self.base - 1e-9 && p[2] <= self.trunk_top() + 1e-9 {
                best = best.min((rho - 0.5 * t.diameter).abs());
            }
        }
        best
    }

    fn validate(&self) -> Result<(), SimError> {
        let dims_ok = self.canopy.iter().all(|d| d.is_finite() && *d > 0.0)
            && self.trunk.is_none_or(|t| t.diameter > 0.0 && t.height > 0.0)
            && self.base >= 0.0;
        if !dims_ok {
            return Err(SimError::InvalidSpec(format!("landmark {} has non-positive dims", self.id)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub min: [f64; 2],
    pub max: [f64; 2],
}

impl Bounds {
    pub fn contains(&self, p: [f64; 2]) -> bool {
        (0..2).all(|a| p[a] >= self.min[a] && p[a] <= self.max[a])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorldSpec {
    pub landmarks: Vec<Landmark>,
    pub bounds: Bounds,
    pub seed: u64,
}

impl WorldSpec {
    pub fn validate(&self) -> Result<(), SimError> {
        for (i, l) in self.landmarks.iter().enumerate() {
            l.validate()?;
            if !self.bounds.contains(l.position) {
                return Err(SimError::InvalidSpec(format!("landmark {} outside bounds", l.id)));
            }
            for m in &self.landmarks[i + 1..] {
                let d = (l.position[0] - m.position[0]).hypot(l.position[1] - m.position[1]);
                if d < MIN_SEPARATION {
                    return Err(SimError::InvalidSpec(format!(
                        "landmarks {} and {} are {d:.2} m apart",
                        l.id, m.id
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn landmark(&self, id: u64) -> Option<&Landmark> {
        self.landmarks.iter().find(|l| l.id == id)
    }
}

fn draw_landmark(rng: &mut ChaCha8Rng, id: u64, class: LandmarkClass) -> Landmark {
    match class {
        LandmarkClass::Tree => {
            let d = rng.random_range(1.5..=4.0);
            let h = rng.random_range(3.0..=8.0);
            Landmark {
                id,
                class,
                position: [0.0; 2],
                canopy: [d, d, h],
                base: BASE_CLEARANCE,
                trunk: Some(Trunk {
                    diameter: rng.random_range(0.2..=0.4),
                    height: rng.random_range(1.0..=2.5),
                }),
            }
        }
        LandmarkClass::Bush => {
            let d = rng.random_range(1.0..=4.0);
            let h = rng.random_range(0.5..=2.0);
            Landmark {
                id,
                class,
                position: [0.0; 2],
                canopy: [d, d, h],
                base: BASE_CLEARANCE,
                trunk: None,
            }
        }
    }
}

/// Places `n_trees` trees then `n_bushes` bushes by rejection sampling.
/// Footprints keep at least [`MIN_SEPARATION`] between them and stay inside
/// the bounds.
pub fn gen_world(seed: u64, n_trees: usize, n_bushes: usize, bounds: Bounds) -> Result<WorldSpec, SimError> {
    let mut rng = ChaCha8Rng::seed_from_u64(stream_seed(seed, 0, streams::WORLD));
    let n = n_trees + n_bushes;
    let mut landmarks: Vec<Landmark> = Vec::with_capacity(n);
    let mut rejections = 0usize;
    let classes = std::iter::repeat_n(LandmarkClass::Tree, n_trees)
        .chain(std::iter::repeat_n(LandmarkClass::Bush, n_bushes));
    for (id, class) in classes.enumerate() {
        let mut l = draw_landmark(&mut rng, id as u64, class);
        let r = l.footprint_radius();
        loop {
            let (lo, hi) = (
                [bounds.min[0] + r, bounds.min[1] + r],
                [bounds.max[0] - r, bounds.max[1] - r],
            );
            let fits = lo[0] <= hi[0] && lo[1] <= hi[1];
            if fits {
                let p = [rng.random_range(lo[0]..=hi[0]), rng.random_range(lo[1]..=hi[1])];
                let clear = landmarks.iter().all(|m| {
                    let d = (p[0] - m.position[0]).hypot(p[1] - m.position[1]);
                    d >= r + m.footprint_radius() + MIN_SEPARATION
                });
                if clear {
                    l.position = p;
                    break;
                }
            }
            rejections += 1;
            if rejections > 10 * n {
                return Err(SimError::PlacementFailure {
                    placed: landmarks.len(),
                    requested: n,
                });
            }
        }
        landmarks.push(l);
    }
    Ok(WorldSpec {
        landmarks,
        bounds,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square(half: f64) -> Bounds {
        Bounds {
            min: [-half, -half],
            max: [half, half],
        }
    }

    #[test]
    fn empty_world() {
        let w = gen_world(1, 0, 0, square(30.0)).unwrap();
        assert!(w.landmarks.is_empty());
    }

    #[test]
    fn deterministic() {
        assert_eq!(
            gen_world(5, 6, 4, square(30.0)).unwrap(),
            gen_world(5, 6, 4, square(30.0)).unwrap()
        );
        assert_ne!(
            gen_world(5, 6, 4, square(30.0)).unwrap(),
            gen_world(6, 6, 4, square(30.0)).unwrap()
        );
    }

    #[test]
    fn separation_and_ranges() {
        for seed in 0..20 {
            let w = gen_world(seed, 6, 4, square(30.0)).unwrap();
            w.validate().unwrap();
            assert_eq!(w.landmarks.len(), 10);
            for (i, a) in w.landmarks.iter().enumerate() {
                match a.class {
                    LandmarkClass::Tree => {
                        assert!((3.0..=8.0).contains(&a.canopy[2]) && (1.5..=4.0).contains(&a.canopy[0]));
                        assert!(a.trunk.is_some());
                    }
                    LandmarkClass::Bush => {
                        assert!((0.5..=2.0).contains(&a.canopy[2]) && (1.0..=4.0).contains(&a.canopy[0]));
                    }
                }
                for b in &w.landmarks[i + 1..] {
                    let d = (a.position[0] - b.position[0]).hypot(a.position[1] - b.position[1]);
                    assert!(d >= 2.0);
                }
            }
        }
    }

    #[test]
    fn crowded_bounds_fail() {
        let err = gen_world(0, 10, 10, square(3.0)).unwrap_err();
        assert!(matches!(err, SimError::PlacementFailure { requested: 20, .. }));
    }

    #[test]
    fn sphere_area() {
        let a = ellipsoid_area([1.0, 1.0, 1.0]);
        assert!((a - 4.0 * std::f64::consts::PI).abs() < 1e-9);
    }
}
