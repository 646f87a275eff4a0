mod common;

use landmark_core::geometry::{
    iou_2d, max_signed_distance, overlap_3d, project_box, project_point, signed_distance, Box3D, BoxSide,
    CameraProjection, Extrinsic, Rect2D,
};
use proptest::prelude::*;

use common::oracle_max_signed_distance;

fn rect() -> impl Strategy<Value = Rect2D> {
    (-100.0..100.0f64, -100.0..100.0f64, 0.1..80.0f64, 0.1..80.0f64)
        .prop_map(|(x, y, w, h)| Rect2D::new(x, y, x + w, y + h))
}

fn box3() -> impl Strategy<Value = Box3D> {
    (
        prop::array::uniform3(-10.0..10.0f64),
        prop::array::uniform3(0.05..6.0f64),
    )
        .prop_map(|(c, d)| Box3D::new(c, d).unwrap())
}

fn point() -> impl Strategy<Value = [f64; 3]> {
    prop::array::uniform3(-15.0..15.0f64)
}

proptest! {
    #[test]
    fn iou_symmetric_and_bounded(a in rect(), b in rect()) {
        let ab = iou_2d(&a, &b);
        prop_assert_eq!(ab, iou_2d(&b, &a));
        prop_assert!((0.0..=1.0).contains(&ab));
        prop_assert!((iou_2d(&a, &a) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn overlap_symmetric_and_bounded(a in box3(), b in box3()) {
        let ab = overlap_3d(&a, &b);
        prop_assert_eq!(ab, overlap_3d(&b, &a));
        prop_assert!((0.0..=1.0).contains(&ab));
    }

    #[test]
    fn overlap_scale_invariant(a in box3(), b in box3(), s in 0.1..10.0f64) {
        let scale = |x: &Box3D| Box3D::new(x.center.map(|v| v * s), x.dims.map(|v| v * s)).unwrap();
        let before = overlap_3d(&a, &b);
        let after = overlap_3d(&scale(&a), &scale(&b));
        prop_assert!((before - after).abs() < 1e-9, "{before} vs {after}");
    }

    #[test]
    fn iou_scale_invariant(a in rect(), b in rect(), s in 0.1..10.0f64) {
        let scale = |r: &Rect2D| Rect2D::new(r.x_min * s, r.y_min * s, r.x_max * s, r.y_max * s);
        prop_assert!((iou_2d(&a, &b) - iou_2d(&scale(&a), &scale(&b))).abs() < 1e-9);
    }

    #[test]
    fn signed_distance_matches_oracle(c in point(), b in box3()) {
        let got = max_signed_distance(c, &b);
        let want = oracle_max_signed_distance(c, &b);
        prop_assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        let by_side = BoxSide::ALL.iter().map(|s| signed_distance(c, &b, *s)).fold(f64::NEG_INFINITY, f64::max);
        prop_assert_eq!(got, by_side);
    }

    #[test]
    fn signed_distance_sign_follows_containment(c in point(), b in box3()) {
        let phi = max_signed_distance(c, &b);
        if b.strictly_contains(c) {
            prop_assert!(phi > 0.0);
        } else {
            prop_assert!(phi <= 0.0);
        }
    }

    /// Every point of a box in front of the camera projects inside the
    /// encasing rectangle, and the rectangle is tight on the corners.
    #[test]
    fn projected_box_encases_interior(
        c in (-3.0..3.0f64, -3.0..3.0f64, 6.0..30.0f64),
        d in prop::array::uniform3(0.1..4.0f64),
        fracs in prop::collection::vec(prop::array::uniform3(0.0..1.0f64), 1..40),
    ) {
        let ext = Extrinsic::identity();
        let proj = CameraProjection::pinhole(700.0, 700.0, 640.0, 360.0);
        let b = Box3D::new([c.0, c.1, c.2], d).unwrap();
        let r = project_box(&b, &ext, &proj).unwrap();
        let (lo, hi) = (b.min(), b.max());
        for f in fracs {
            let p = [0, 1, 2].map(|k| lo[k] + f[k] * (hi[k] - lo[k]));
            let [u, v] = project_point(p, &ext, &proj).unwrap();
            prop_assert!(u >= r.x_min - 1e-9 && u <= r.x_max + 1e-9);
            prop_assert!(v >= r.y_min - 1e-9 && v <= r.y_max + 1e-9);
        }
        let corners: Vec<[f64; 2]> = b.corners().iter().map(|k| project_point(*k, &ext, &proj).unwrap()).collect();
        let umin = corners.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min);
        let vmax = corners.iter().map(|p| p[1]).fold(f64::NEG_INFINITY, f64::max);
        prop_assert_eq!(umin, r.x_min);
        prop_assert_eq!(vmax, r.y_max);
    }
}

#[test]
fn one_meter_outside_a_face() {
    let b = Box3D::new([0.0; 3], [2.0; 3]).unwrap();
    assert!((max_signed_distance([2.0, 0.0, 0.0], &b) + 1.0).abs() < 1e-12);
    assert!((max_signed_distance([0.0, 0.0, 0.0], &b) - 1.0).abs() < 1e-12);
}
