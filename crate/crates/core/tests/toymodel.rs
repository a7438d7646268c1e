use proptest::prelude::*;
use wmx_core::toymodel::*;

fn cube(min_psnr: f64, rule: ConflictRule) -> ToyConfig {
    ToyConfig::new(3, 1, 1, 3, min_psnr, rule)
}

// The farthest corner lies at l2 distance sqrt(3)/2, inside the ball iff psnr <= 6.02 dB.
const CUBE_PSNR: f64 = 6.0;

#[test]
fn cube_ball_has_27_points() {
    let ball = quality_ball(&cube(CUBE_PSNR, ConflictRule::Adjacent)).unwrap();
    assert_eq!(ball.len(), 27);
    assert_eq!(ball[0], vec![0, 0, 0]);
    assert_eq!(ball[26], vec![2, 2, 2]);
}

#[test]
fn ball_radius_oracle() {
    // eps^2 = 3 * 10^(-p/10); points kept iff 0.25 * |p - c|^2 <= eps^2
    for p in [6.0, 7.27, 10.0, 13.0] {
        let cfg = cube(p, ConflictRule::Adjacent);
        let eps2 = 3.0 * 10f64.powf(-p / 10.0);
        let expected = (0..27)
            .filter(|i| {
                let d2: usize = [i / 9, i / 3 % 3, i % 3].iter().map(|&x: &usize| x.abs_diff(1).pow(2)).sum();
                0.25 * d2 as f64 <= eps2
            })
            .count();
        assert_eq!(quality_ball(&cfg).unwrap().len(), expected, "psnr {p}");
    }
}

#[test]
fn adjacency_maximum_is_14() {
    let report = watermark_sets(&cube(CUBE_PSNR, ConflictRule::Adjacent)).unwrap();
    assert_eq!(report.max_size, 14);
    assert!((report.capacity_bits - 14f64.log2()).abs() < 1e-12);
    assert!(is_independent(&report.maximum_set.points, ConflictRule::Adjacent));
}

#[test]
fn ball_overlap_maximum_is_5_and_size_4_maximal_exists() {
    let rule = ConflictRule::BallOverlap { radius: 1 };
    let cfg = cube(CUBE_PSNR, rule);
    let report = watermark_sets(&cfg).unwrap();
    let ball = quality_ball(&cfg).unwrap();
    assert_eq!(report.max_size, 5);
    assert!(report.maximal_sets_exhaustive);
    let four = report.maximal_sets.iter().find(|s| s.size == 4).expect("size-4 maximal set");
    assert!(is_maximal(&four.points, &ball, rule));
    assert_eq!(four.capacity_bits, 2.0);
    assert_eq!(*report.maximal_size_histogram.keys().max().unwrap(), 5);
}

#[test]
fn even_corner_set_is_independent() {
    let rule = ConflictRule::BallOverlap { radius: 1 };
    let set = vec![vec![0, 0, 0], vec![2, 2, 0], vec![2, 0, 2], vec![0, 2, 2]];
    assert!(is_independent(&set, rule));
    let ball = quality_ball(&cube(CUBE_PSNR, rule)).unwrap();
    // the body centre is at l1 distance 3 from every corner
    let mut extended = set.clone();
    extended.push(vec![1, 1, 1]);
    assert!(is_independent(&extended, rule));
    assert!(is_maximal(&extended, &ball, rule));
}

#[test]
fn branch_and_bound_matches_subset_oracle() {
    for psnr in [7.27, 9.0, 13.0] {
        for rule in [ConflictRule::Adjacent, ConflictRule::BallOverlap { radius: 1 }] {
            let ball = quality_ball(&cube(psnr, rule)).unwrap();
            assert!(ball.len() <= 24);
            assert_eq!(
                maximum_independent_set(&ball, rule).len(),
                brute_force_max_size(&ball, rule),
                "psnr {psnr} rule {rule}"
            );
        }
    }
}

#[test]
fn greedy_sets_are_maximal() {
    let rule = ConflictRule::Adjacent;
    let ball = quality_ball(&cube(CUBE_PSNR, rule)).unwrap();
    let sets = greedy_maximal_sets(&ball, rule);
    assert!(!sets.is_empty());
    for s in sets {
        let pts: Vec<Point> = s.iter().map(|&i| ball[i].clone()).collect();
        assert!(is_maximal(&pts, &ball, rule));
    }
}

#[test]
fn coexistence_with_center_is_identity() {
    let cfg = cube(CUBE_PSNR, ConflictRule::BallOverlap { radius: 1 });
    let report = watermark_sets(&cfg).unwrap();
    let a = report.maximum_set.points.clone();
    let r = toy_coexistence(&a, std::slice::from_ref(&cfg.center), &cfg).unwrap();
    assert_eq!(r.composed, a);
    assert_eq!(r.overlap_with_a, a.len());
    assert_eq!(r.separation_violations, r.violations_within_a);
    assert_eq!(r.separation_violations, 0);
    assert_eq!(r.outside_ball, 0);
}

#[test]
fn coexistence_of_two_sets_breaks_separation() {
    let cfg = cube(CUBE_PSNR, ConflictRule::BallOverlap { radius: 1 });
    let a = watermark_sets(&cfg).unwrap().maximum_set.points;
    let r = toy_coexistence(&a, &a, &cfg).unwrap();
    assert!(r.separation_violations > 0);
}

#[test]
fn tiny_epsilon_keeps_only_center() {
    let cfg = cube(f64::INFINITY, ConflictRule::Adjacent);
    assert_eq!(cfg.epsilon(), 0.0);
    assert_eq!(quality_ball(&cfg).unwrap(), vec![vec![1, 1, 1]]);
    // eps = 0.49 < step 0.5
    let p = -10.0 * (0.49f64 * 0.49 / 3.0).log10();
    assert_eq!(quality_ball(&cube(p, ConflictRule::Adjacent)).unwrap().len(), 1);
}

#[test]
fn two_level_grid_has_positive_capacity() {
    for rule in [ConflictRule::Adjacent, ConflictRule::BallOverlap { radius: 2 }] {
        let r = watermark_sets(&ToyConfig::new(3, 1, 1, 2, 0.0, rule)).unwrap();
        assert!(r.max_size >= 1);
        assert!(r.capacity_bits >= 0.0);
    }
}

#[test]
fn corner_sets_compose_without_overlap() {
    let cfg = cube(CUBE_PSNR, ConflictRule::BallOverlap { radius: 1 });
    let even = vec![vec![0, 0, 0], vec![2, 2, 0], vec![2, 0, 2], vec![0, 2, 2]];
    let odd = vec![vec![2, 2, 2], vec![0, 0, 2], vec![0, 2, 0], vec![2, 0, 0]];
    let r = toy_coexistence(&even, &odd, &cfg).unwrap();
    // complementary corners cancel to the centre; the other 12 pairs land on edge midpoints
    assert_eq!(r.composed.len(), 13);
    assert!(r.composed.contains(&vec![1, 1, 1]));
    assert_eq!(r.overlap_with_a, 0);
    assert_eq!(r.overlap_with_b, 0);
    assert_eq!(r.outside_ball, 0);
    assert_eq!(r.beyond_epsilon_unclamped, 12);
    assert!(r.separation_violations > 0);
    assert_eq!(r.violations_within_a, 0);
}

#[test]
fn errors() {
    let mut cfg = cube(CUBE_PSNR, ConflictRule::Adjacent);
    cfg.levels = 1;
    assert!(matches!(quality_ball(&cfg), Err(ToyError::InvalidConfig(_))));
    let big = ToyConfig::new(3, 8, 8, 16, 1.0, ConflictRule::Adjacent);
    assert!(matches!(quality_ball(&big), Err(ToyError::BallTooLarge(_))));
    let cfg = cube(CUBE_PSNR, ConflictRule::Adjacent);
    assert!(matches!(
        toy_coexistence(&[vec![0, 0]], &[vec![1, 1, 1]], &cfg),
        Err(ToyError::ShapeMismatch { expected: 3, found: 2 })
    ));
}

#[test]
fn report_json_round_trips_keys() {
    let report = watermark_sets(&cube(CUBE_PSNR, ConflictRule::Adjacent)).unwrap();
    let v: serde_json::Value = serde_json::from_str(&report.to_json()).unwrap();
    assert_eq!(v["max_size"], 14);
    assert_eq!(v["ball_size"], 27);
    assert_eq!(v["rule"], "adjacent");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]
    #[test]
    fn maximum_dominates_every_maximal(psnr in 6.0f64..16.0, radius in 0usize..3) {
        let rule = if radius == 0 { ConflictRule::Adjacent } else { ConflictRule::BallOverlap { radius } };
        let cfg = cube(psnr, rule);
        let ball = quality_ball(&cfg).unwrap();
        let max = maximum_independent_set(&ball, rule).len();
        let (sets, complete) = maximal_independent_sets(&ball, rule, 100_000);
        prop_assert!(complete);
        prop_assert_eq!(sets.iter().map(Vec::len).max().unwrap(), max);
        for s in sets {
            let pts: Vec<Point> = s.iter().map(|&i| ball[i].clone()).collect();
            prop_assert!(is_maximal(&pts, &ball, rule));
        }
    }
}
