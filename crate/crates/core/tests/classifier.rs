use landmark_core::classes::{ClassScores, LandmarkClass};
use landmark_core::classifier::{classify_geometric, sample_points, GeometricFeatures, SampledCloud};
use landmark_core::geometry::Point4;
use proptest::prelude::*;

fn cloud() -> impl Strategy<Value = Vec<Point4>> {
    prop::collection::vec(
        (-2.0..2.0f64, -2.0..2.0f64, 0.0..6.0f64, 0.0..1.0f64).prop_map(|(x, y, z, i)| Point4::new(x, y, z, i)),
        3..200,
    )
}

fn moved(points: &[Point4], dx: f64, dy: f64, yaw: f64) -> Vec<Point4> {
    let (s, c) = yaw.sin_cos();
    points
        .iter()
        .map(|p| Point4::new(c * p.x - s * p.y + dx, s * p.x + c * p.y + dy, p.z, p.intensity))
        .collect()
}

fn as_sample(points: Vec<Point4>) -> SampledCloud {
    let n = points.len();
    SampledCloud {
        points,
        source_indices: (0..n).collect(),
        source_count: n,
    }
}

proptest! {
    #[test]
    fn features_invariant_to_planar_motion(
        pts in cloud(),
        dx in -50.0..50.0f64, dy in -50.0..50.0f64, yaw in -3.2..3.2f64,
    ) {
        let a = GeometricFeatures::compute(&pts);
        let b = GeometricFeatures::compute(&moved(&pts, dx, dy, yaw));
        prop_assert!((a.height - b.height).abs() < 1e-9);
        prop_assert!((a.footprint - b.footprint).abs() < 1e-6);
        prop_assert_eq!(a.top_fraction, b.top_fraction);
        prop_assert!((a.mean_intensity - b.mean_intensity).abs() < 1e-12);

        let prior = ClassScores::uniform(LandmarkClass::COUNT);
        let sa = classify_geometric(&as_sample(pts.clone()), &prior);
        let sb = classify_geometric(&as_sample(moved(&pts, dx, dy, yaw)), &prior);
        for (x, y) in sa.as_slice().iter().zip(sb.as_slice()) {
            prop_assert!((x - y).abs() < 1e-6);
        }
        prop_assert!(sa.is_normalized());
    }

    #[test]
    fn sample_has_exactly_n_p(pts in cloud(), n_p in 1..600usize, seed in any::<u64>()) {
        let s = sample_points(&pts, n_p, seed).unwrap();
        prop_assert_eq!(s.points.len(), n_p);
        prop_assert_eq!(s.source_count, pts.len());
        for (p, &i) in s.points.iter().zip(&s.source_indices) {
            prop_assert_eq!(*p, pts[i]);
        }
        if pts.len() >= n_p {
            let mut idx = s.source_indices.clone();
            idx.sort_unstable();
            idx.dedup();
            prop_assert_eq!(idx.len(), n_p, "without replacement");
        }
        prop_assert_eq!(s, sample_points(&pts, n_p, seed).unwrap());
    }
}

#[test]
fn empty_cloud_is_an_error() {
    assert!(sample_points(&[], 512, 0).is_err());
}
