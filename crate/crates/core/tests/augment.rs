use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wmx_core::augment::{apply_step, apply_suite, AugmentationStep, AugmentationSuite, StepKind, SuiteName};
use wmx_core::harness::synthetic_image;
use wmx_core::imgcore::psnr;
use wmx_core::Image;

fn all_kinds() -> Vec<StepKind> {
    let mut kinds: Vec<StepKind> = SuiteName::ALL
        .iter()
        .flat_map(|s| {
            let s = s.suite();
            s.always.into_iter().chain(s.pool).map(|st| st.kind)
        })
        .collect();
    kinds.dedup();
    kinds
}

#[test]
fn suite_census() {
    let r = SuiteName::Rivagan.suite();
    assert_eq!((r.always.len(), r.pool.len(), r.choose), (3, 0, 0));
    assert!(r.always.iter().all(|s| s.probability == 0.5));
    let s = SuiteName::Ssl.suite();
    assert_eq!((s.always.len(), s.pool.len(), s.choose), (1, 5, 1));
    assert!(s.pool.contains(&AugmentationStep::always(StepKind::Identity)));
    for t in [SuiteName::TrustmarkLow, SuiteName::TrustmarkMedium, SuiteName::TrustmarkHigh] {
        let t = t.suite();
        assert_eq!((t.always.len(), t.pool.len(), t.choose), (2, 15, 2));
        assert!(t.pool.iter().all(|s| s.probability == 0.5));
        t.validate().unwrap();
    }
}

#[test]
fn suite_parameters_by_level() {
    let low = SuiteName::TrustmarkLow.suite();
    let high = SuiteName::TrustmarkHigh.suite();
    assert_eq!(low.pool[0].kind, StepKind::Jpeg { quality: 70 });
    assert_eq!(SuiteName::TrustmarkMedium.suite().pool[0].kind, StepKind::Jpeg { quality: 50 });
    assert_eq!(high.pool[0].kind, StepKind::Jpeg { quality: 40 });
    assert_eq!(low.pool[9].kind, StepKind::Posterize { bits: 5 });
    assert_eq!(high.pool[9].kind, StepKind::Posterize { bits: 3 });
    assert_eq!(
        high.pool[8].kind,
        StepKind::MotionBlur { kernel: (3, 9), angle: (-90.0, 90.0), direction: (-1.0, 1.0) }
    );
    assert_eq!(
        SuiteName::Rivagan.suite().always[2].kind,
        StepKind::FrequencyCompress { keep: (0.5, 1.0) }
    );
    assert_eq!("trustmark_medium".parse::<SuiteName>().unwrap(), SuiteName::TrustmarkMedium);
    assert!("bogus".parse::<SuiteName>().is_err());
}

#[test]
fn probability_zero_is_identity_for_every_kind() {
    let img = synthetic_image(1, 48, 40);
    for kind in all_kinds() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let out = apply_step(&img, &AugmentationStep::new(kind.clone(), 0.0), &mut rng).unwrap();
        assert_eq!(out, img, "{kind:?}");
    }
}

#[test]
fn every_kind_keeps_shape_and_range() {
    let img = synthetic_image(2, 48, 40);
    for kind in all_kinds() {
        for seed in 0..4 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let out = apply_step(&img, &AugmentationStep::always(kind.clone()), &mut rng).unwrap();
            assert_eq!((out.width(), out.height(), out.channels()), (48, 40, 3), "{kind:?}");
            assert!(out
                .data()
                .iter()
                .all(|&v| v >= out.pixel_min() && v <= out.pixel_max()));
        }
    }
}

#[test]
fn flip_is_an_involution() {
    let img = synthetic_image(4, 33, 17);
    let flip = AugmentationStep::always(StepKind::HorizontalFlip);
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let once = apply_step(&img, &flip, &mut rng).unwrap();
    assert_ne!(once, img);
    assert_eq!(apply_step(&once, &flip, &mut rng).unwrap(), img);
}

#[test]
fn posterize_eight_bits_is_identity() {
    let img = synthetic_image(5, 16, 16);
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let out = apply_step(&img, &AugmentationStep::always(StepKind::Posterize { bits: 8 }), &mut rng).unwrap();
    assert_eq!(out, img);
}

#[test]
fn rivagan_all_skipped_seed_is_identity() {
    // first seed whose three leading draws all skip
    let seed = (0u64..)
        .find(|&s| {
            let mut r = ChaCha8Rng::seed_from_u64(s);
            (0..3).all(|_| r.random::<f64>() >= 0.5)
        })
        .unwrap();
    let img = synthetic_image(6, 64, 64);
    assert_eq!(apply_suite(&img, &SuiteName::Rivagan.suite(), seed).unwrap(), img);
    // and some other seed changes it
    let other = (0u64..)
        .find(|&s| {
            let mut r = ChaCha8Rng::seed_from_u64(s);
            r.random::<f64>() < 0.5
        })
        .unwrap();
    assert_ne!(apply_suite(&img, &SuiteName::Rivagan.suite(), other).unwrap(), img);
}

#[test]
fn pool_draw_counts() {
    for seed in 0..200 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ssl = SuiteName::Ssl.suite();
        rng.random::<f64>();
        assert_eq!(ssl.schedule(&mut rng).len(), 1);
        let tm = SuiteName::TrustmarkLow.suite();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = tm.schedule(&mut rng);
        assert_eq!(s.len(), 2);
        assert_ne!(s[0], s[1]);
        assert!(s.iter().all(|&i| i < 15));
    }
}

#[test]
fn all_zero_suite_is_identity() {
    let mut suite = SuiteName::TrustmarkHigh.suite();
    for s in suite.always.iter_mut().chain(suite.pool.iter_mut()) {
        s.probability = 0.0;
    }
    let img = synthetic_image(7, 32, 32);
    for seed in 0..10 {
        assert_eq!(apply_suite(&img, &suite, seed).unwrap(), img);
    }
}

#[test]
fn jpeg_is_lossy_but_close() {
    let img = synthetic_image(8, 64, 64);
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let out = apply_step(&img, &AugmentationStep::always(StepKind::Jpeg { quality: 70 }), &mut rng).unwrap();
    assert_ne!(out, img);
    assert!(psnr(&out, &img).unwrap().db() > 28.0);
}

#[test]
fn frequency_compress_full_keep_is_identity() {
    let img = synthetic_image(9, 24, 20);
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let out = apply_step(
        &img,
        &AugmentationStep::always(StepKind::FrequencyCompress { keep: (1.0, 1.0) }),
        &mut rng,
    )
    .unwrap();
    for (a, b) in out.data().iter().zip(img.data()) {
        assert!((a - b).abs() < 1e-9);
    }
}

#[test]
fn invalid_steps_are_rejected() {
    let img = Image::filled(8, 8, 3, 10.0);
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for bad in [
        AugmentationStep::new(StepKind::Identity, 1.5),
        AugmentationStep::always(StepKind::Crop { scale: (1.0, 0.8) }),
        AugmentationStep::always(StepKind::BoxBlur { kernel: 4 }),
    ] {
        assert!(apply_step(&img, &bad, &mut rng).is_err());
    }
    let gray = Image::filled(8, 8, 1, 10.0);
    assert!(apply_step(&gray, &AugmentationStep::always(StepKind::Grayscale), &mut rng).is_err());
    let bad_suite = AugmentationSuite { name: "x".into(), always: vec![], pool: vec![], choose: 1 };
    assert!(apply_suite(&img, &bad_suite, 0).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn suites_are_deterministic_and_range_preserving(seed in any::<u64>(), which in 0usize..5) {
        let img = synthetic_image(seed % 7, 40, 32);
        let suite = SuiteName::ALL[which].suite();
        let a = apply_suite(&img, &suite, seed).unwrap();
        let b = apply_suite(&img, &suite, seed).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert_eq!((a.width(), a.height(), a.channels()), (40, 32, 3));
        prop_assert!(a.data().iter().all(|&v| v >= a.pixel_min() && v <= a.pixel_max()));
    }
}
