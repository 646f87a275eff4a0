use landmark_core::classes::LandmarkClass;
use landmark_core::eval::{compute_metrics, match_frame, GroundTruthBox, ReportedBox};
use landmark_core::geometry::Box3D;
use proptest::prelude::*;

fn class() -> impl Strategy<Value = LandmarkClass> {
    prop_oneof![Just(LandmarkClass::Tree), Just(LandmarkClass::Bush)]
}

fn bbox() -> impl Strategy<Value = Box3D> {
    (prop::array::uniform3(-5.0..5.0f64), prop::array::uniform3(0.5..3.0f64))
        .prop_map(|(c, d)| Box3D::new(c, d).unwrap())
}

fn gts() -> impl Strategy<Value = Vec<GroundTruthBox>> {
    prop::collection::vec((class(), bbox()), 0..6).prop_map(|v| {
        v.into_iter()
            .enumerate()
            .map(|(i, (class, bbox))| GroundTruthBox { frame: 0, landmark: i as u64, class, bbox })
            .collect()
    })
}

fn dets() -> impl Strategy<Value = Vec<ReportedBox>> {
    prop::collection::vec((class(), bbox()), 0..8).prop_map(|v| {
        v.into_iter()
            .enumerate()
            .map(|(i, (class, bbox))| ReportedBox { id: i as u64, class, bbox })
            .collect()
    })
}

proptest! {
    #[test]
    fn counts_partition_ground_truth_and_detections(d in dets(), g in gts()) {
        let m = match_frame(&d, &g);
        let r = compute_metrics(std::slice::from_ref(&m));
        for c in LandmarkClass::ALL {
            let cm = r.class(c);
            prop_assert_eq!(cm.tp + cm.fn_, g.iter().filter(|x| x.class == c).count());
            prop_assert_eq!(cm.tp + cm.fp, d.iter().filter(|x| x.class == c).count());
        }
        for tp in &m.true_positives {
            prop_assert!(g[tp.gt].bbox.contains(d[tp.det].bbox.center));
        }
    }

    /// Reordering detections changes neither counts nor error statistics.
    #[test]
    fn detection_order_does_not_matter(d in dets(), g in gts(), seed in any::<u64>()) {
        let mut shuffled = d.clone();
        let n = shuffled.len();
        for i in (1..n).rev() {
            let j = (seed.wrapping_mul(i as u64 + 7) >> 7) as usize % (i + 1);
            shuffled.swap(i, j);
        }
        let a = compute_metrics(&[match_frame(&d, &g)]);
        let b = compute_metrics(&[match_frame(&shuffled, &g)]);
        for c in LandmarkClass::ALL {
            let (x, y) = (a.class(c), b.class(c));
            prop_assert_eq!((x.tp, x.fp, x.fn_), (y.tp, y.fp, y.fn_));
        }
    }
}
