mod common;

use landmark_core::clustering::{cluster, connected_components, segment, ClusteringConfig};
use landmark_core::par::Execution;
use landmark_core::simulator::{render_frame, PointLabel, Scenario};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn components_match_brute_force(seed in any::<u64>(), radius in 0.1..1.2f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cloud = random_cloud(&mut rng, 600);
        prop_assert_eq!(
            normalize_groups(connected_components(&cloud, radius)),
            brute_force_components(&cloud, radius)
        );
    }

    #[test]
    fn clusters_partition_surviving_points(seed in any::<u64>(), min_points in 1..20usize) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cloud = random_cloud(&mut rng, 600);
        let inst = cluster(&cloud, 0.5, min_points);
        let mut seen = vec![false; cloud.len()];
        for (k, i) in inst.iter().enumerate() {
            prop_assert_eq!(i.id, k);
            prop_assert!(i.indices.len() >= min_points);
            for (&j, p) in i.indices.iter().zip(&i.points) {
                prop_assert!(!seen[j]);
                seen[j] = true;
                prop_assert_eq!(*p, cloud[j]);
                prop_assert!(i.bbox.contains([p.x, p.y, p.z]));
            }
        }
    }
}

/// Ground removal plus clustering keeps nearly every landmark point of a
/// rendered benchmark frame.
#[test]
fn landmark_points_survive_segmentation() {
    let s = Scenario::benchmark(0).unwrap();
    let ego = s.ego_poses()[0];
    let f = render_frame(&s.world, &ego, &s.sensor, 5, Execution::Parallel);
    let inst = segment(&f.cloud, &ClusteringConfig::default());
    let mut kept = vec![false; f.cloud.len()];
    for i in &inst {
        for &j in &i.indices {
            kept[j] = true;
        }
    }
    let object: Vec<usize> = (0..f.cloud.len())
        .filter(|&i| matches!(f.labels[i], PointLabel::Landmark(_)))
        .collect();
    let retained = object.iter().filter(|&&i| kept[i]).count() as f64 / object.len() as f64;
    assert!(object.len() > 1000);
    assert!(retained >= 0.99, "retained {retained}");
}

#[test]
fn segmentation_is_deterministic() {
    let s = Scenario::benchmark(1).unwrap();
    let ego = s.ego_poses()[10];
    let a = render_frame(&s.world, &ego, &s.sensor, 9, Execution::Parallel);
    let b = render_frame(&s.world, &ego, &s.sensor, 9, Execution::Sequential);
    assert_eq!(a.cloud, b.cloud);
    let cfg = ClusteringConfig::default();
    assert_eq!(segment(&a.cloud, &cfg), segment(&b.cloud, &cfg));
}
