use std::sync::Arc;
use wmx_core::augment::{AugmentationSuite, SuiteName};
use wmx_core::ensemble::{Ensemble, Mode};
use wmx_core::harness::{
    coexistence_matrix, eval_accuracy, eval_robustness, eval_with_role, psnr_distribution,
    tradeoff_sweep, Corpus, Executor, Report, Role,
};
use wmx_core::imgcore::save_png;
use wmx_core::watermark::doubles::{FlipOneDouble, LsbDouble, PassThrough, StampDouble};
use wmx_core::watermark::default_watermarker;
use wmx_core::{Image, MethodId, Watermarker};

fn small_corpus() -> Corpus {
    Corpus::synthetic(4, 32, 9).unwrap()
}

fn zero_prob(mut s: AugmentationSuite) -> AugmentationSuite {
    for st in s.always.iter_mut().chain(s.pool.iter_mut()) {
        st.probability = 0.0;
    }
    s
}

#[test]
fn perfect_double_scores_one() {
    let r = eval_accuracy(&LsbDouble::new(32, 0, 1), &small_corpus(), 3, 1, &Executor::sequential()).unwrap();
    assert_eq!(r.accuracy, 1.0);
    assert_eq!(r.count, 12);
    assert_eq!(r.images.len(), 4);
}

#[test]
fn one_flipped_bit_scores_zero() {
    let wm = FlipOneDouble(LsbDouble::new(32, 0, 1));
    let r = eval_accuracy(&wm, &small_corpus(), 3, 1, &Executor::sequential()).unwrap();
    assert_eq!(r.accuracy, 0.0);
    assert!((r.bit_accuracy - 31.0 / 32.0).abs() < 1e-12);
}

#[test]
fn same_seed_same_report_any_worker_count() {
    let c = small_corpus();
    let wm = default_watermarker(MethodId::Dwt);
    let a = eval_accuracy(&*wm, &c, 2, 4, &Executor::sequential()).unwrap();
    let b = eval_accuracy(&*wm, &c, 2, 4, &Executor::new(8)).unwrap();
    assert_eq!(a.to_csv(), b.to_csv());
    assert_eq!(a.to_json(), b.to_json());
}

#[test]
fn zero_probability_suite_matches_clean_accuracy() {
    let c = small_corpus();
    let wm = default_watermarker(MethodId::Dwt);
    let ex = Executor::sequential();
    let clean = eval_accuracy(&*wm, &c, 2, 5, &ex).unwrap();
    let robust = eval_robustness(&*wm, &c, &zero_prob(SuiteName::TrustmarkHigh.suite()), 2, 5, &ex).unwrap();
    assert_eq!(clean.images, robust.images);
}

#[test]
fn identity_double_survives_every_suite() {
    for s in SuiteName::ALL {
        let r = eval_robustness(&PassThrough, &small_corpus(), &s.suite(), 2, 1, &Executor::sequential()).unwrap();
        assert_eq!(r.accuracy, 1.0);
    }
}

#[test]
fn robustness_not_above_accuracy() {
    let c = Corpus::synthetic(10, 64, 2).unwrap();
    let ex = Executor::new(4);
    for m in [MethodId::Dct, MethodId::SpreadSpectrum] {
        let wm = default_watermarker(m);
        let clean = eval_accuracy(&*wm, &c, 10, 3, &ex).unwrap();
        let robust = eval_robustness(&*wm, &c, &SuiteName::Rivagan.suite(), 10, 3, &ex).unwrap();
        assert!(robust.accuracy <= clean.accuracy + 0.05, "{m}");
    }
}

#[test]
fn disjoint_lsb_doubles_coexist_fully() {
    let methods: Vec<Arc<dyn Watermarker>> = vec![
        Arc::new(LsbDouble::new(16, 0, 2)),
        Arc::new(LsbDouble::new(16, 1, 2)),
    ];
    let m = coexistence_matrix(&methods, &small_corpus(), 2, 3, &Executor::sequential()).unwrap();
    let off = [m.cell(0, 1), m.cell(1, 0)];
    for c in off {
        assert_eq!(
            (c.first_alone, c.first_after_second, c.second_with_first, c.second_alone),
            (1.0, 1.0, 1.0, 1.0)
        );
    }
    // diagonal overwrites
    assert_eq!(m.cell(0, 0).second_with_first, 1.0);
    assert!(m.cell(0, 0).first_after_second < 0.2);
    assert_eq!(m.to_csv().lines().count(), 1 + 4);
}

#[test]
fn single_method_matrix_is_diagonal_only() {
    let methods: Vec<Arc<dyn Watermarker>> = vec![default_watermarker(MethodId::Dct)];
    let c = Corpus::synthetic(2, 64, 1).unwrap();
    let m = coexistence_matrix(&methods, &c, 1, 3, &Executor::sequential()).unwrap();
    assert_eq!(m.cells.len(), 1);
}

#[test]
fn second_alone_matches_role_two_accuracy() {
    let methods: Vec<Arc<dyn Watermarker>> = vec![
        default_watermarker(MethodId::Dct),
        default_watermarker(MethodId::Dwt),
    ];
    let c = Corpus::synthetic(3, 64, 4).unwrap();
    let ex = Executor::new(2);
    let m = coexistence_matrix(&methods, &c, 2, 8, &ex).unwrap();
    let solo = eval_with_role(&*methods[1], &c, None, 2, 8, Role::Second, &ex).unwrap();
    assert_eq!(m.cell(0, 1).second_alone, solo.accuracy);
    let first = eval_accuracy(&*methods[0], &c, 2, 8, &ex).unwrap();
    assert_eq!(m.cell(0, 1).first_alone, first.accuracy);
}

#[test]
fn sweep_row_counts_and_capacity() {
    let ens = Ensemble::new(
        Arc::new(LsbDouble::new(8, 0, 2)),
        Arc::new(LsbDouble::new(8, 1, 2)),
        Mode::Series,
        None,
        None,
    )
    .unwrap();
    let c = small_corpus();
    let ex = Executor::sequential();
    let one = tradeoff_sweep(&ens, &[0.5], &c, &[], 1, 1, &ex).unwrap();
    assert_eq!(one.rows.len(), 2);
    assert!(one.rows.iter().all(|r| r.capacity == 16));
    let strengths: Vec<f64> = (0..8).map(|i| -0.2 + 0.2 * i as f64).collect();
    let suites = [SuiteName::Rivagan.suite()];
    let full = tradeoff_sweep(&ens, &strengths, &c, &suites, 1, 1, &ex).unwrap();
    assert_eq!(full.rows.len(), 16);
    assert_eq!(full.to_csv().lines().count(), 17);
    assert!(tradeoff_sweep(&ens, &[], &c, &[], 1, 1, &ex).is_err());
}

#[test]
fn sweep_psnr_tracks_strength() {
    let ens = Ensemble::new(
        default_watermarker(MethodId::DwtDctSvd),
        default_watermarker(MethodId::SpreadSpectrum),
        Mode::Series,
        None,
        None,
    )
    .unwrap();
    let c = Corpus::synthetic(3, 128, 6).unwrap();
    let strengths = [-0.2, 0.0, 0.4, 0.8, 1.2];
    let r = tradeoff_sweep(&ens, &strengths, &c, &[], 1, 2, &Executor::new(3)).unwrap();
    for mode_rows in r.rows.chunks(strengths.len()) {
        for w in mode_rows.windows(2) {
            assert!(w[1].mean_psnr >= w[0].mean_psnr - 0.05, "{:?}", w);
        }
    }
}

#[test]
fn identical_stamps_give_identical_distributions() {
    let stamp = || Arc::new(StampDouble { capacity: 4, stride: 7, value: 0.0 });
    let ens = Ensemble::new(stamp(), stamp(), Mode::Series, None, None).unwrap();
    let d = psnr_distribution(&ens, &small_corpus(), 1, 30.0, &Executor::sequential()).unwrap();
    assert_eq!(d.series, d.parallel);
}

#[test]
fn empty_inputs_are_errors() {
    assert!(Corpus::from_images("e", vec![], vec![]).is_err());
    let dir = tempfile::tempdir().unwrap();
    assert!(Corpus::load_dir(dir.path(), None).is_err());
    assert!(eval_accuracy(&PassThrough, &small_corpus(), 0, 1, &Executor::sequential()).is_err());
}

#[test]
fn corpus_directory_is_sorted() {
    let dir = tempfile::tempdir().unwrap();
    for (name, v) in [("b.png", 20.0), ("a.png", 10.0), ("c.png", 30.0)] {
        save_png(&Image::filled(600, 300, 3, v), dir.path().join(name)).unwrap();
    }
    std::fs::write(dir.path().join("notes.txt"), "x").unwrap();
    let c = Corpus::load_dir(dir.path(), Some(512)).unwrap();
    assert_eq!(c.names, ["a.png", "b.png", "c.png"]);
    assert_eq!(c.images[0].data()[0], 10.0);
    assert_eq!((c.images[0].width(), c.images[0].height()), (300, 300));
    let capped = Corpus::load_dir(dir.path(), Some(128)).unwrap();
    assert_eq!((capped.images[2].width(), capped.images[2].height()), (128, 128));
}
