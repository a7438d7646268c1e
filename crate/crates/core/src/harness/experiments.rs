use super::corpus::Corpus;
use super::exec::Executor;
use super::report::{
    AccuracyReport, CoexCell, CoexistenceMatrix, ImageScore, PsnrDistribution, SuiteScore,
    TradeoffReport, TradeoffRow,
};
use super::seeds::{trial_seed, Role};
use super::HarnessError;
use crate::augment::{apply_suite, AugmentationSuite};
use crate::ensemble::{clip_target, clip_to_target, compose, standalone_psnrs, Ensemble, Mode};
use crate::imgcore::{psnr, Image};
use crate::watermark::{Secret, WatermarkError, Watermarker};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

fn secret_for(len: usize, seed: u64) -> Secret {
    Secret::random(len, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// `(all bits correct, fraction of bits correct)`; a decode failure scores zero.
fn score(wm: &dyn Watermarker, img: &Image, expected: &Secret) -> Result<(bool, f64), HarnessError> {
    match wm.extract(img) {
        Ok(got) => Ok((got == *expected, got.bit_accuracy(expected))),
        Err(WatermarkError::DecodeFailure) => Ok((false, 0.0)),
        Err(e) => Err(e.into()),
    }
}

fn check_trials(trials: usize) -> Result<(), HarnessError> {
    if trials == 0 {
        Err(HarnessError::Invalid("trials per image must be >= 1".into()))
    } else {
        Ok(())
    }
}

/// Full-secret accuracy with secrets drawn from the `role` stream, optionally
/// after an augmentation suite.
#[allow(clippy::too_many_arguments)]
pub fn eval_with_role(
    wm: &dyn Watermarker,
    corpus: &Corpus,
    suite: Option<&AugmentationSuite>,
    trials: usize,
    seed: u64,
    role: Role,
    exec: &Executor,
) -> Result<AccuracyReport, HarnessError> {
    check_trials(trials)?;
    if let Some(s) = suite {
        s.validate()?;
    }
    let cap = wm.capacity();
    let per_image = exec.map(&corpus.images, |i, img| -> Result<ImageScore, HarnessError> {
        let mut successes = 0;
        let mut bits = 0.0;
        for t in 0..trials {
            let s = secret_for(cap, trial_seed(seed, i, t, role));
            let mut marked = wm.embed(img, &s)?;
            if let Some(suite) = suite {
                marked = apply_suite(&marked, suite, trial_seed(seed, i, t, Role::Augment))?;
            }
            let (ok, b) = score(wm, &marked, &s)?;
            successes += ok as usize;
            bits += b;
        }
        Ok(ImageScore {
            image: corpus.names[i].clone(),
            trials,
            successes,
            accuracy: successes as f64 / trials as f64,
            bit_accuracy: bits / trials as f64,
        })
    });
    let images = per_image.into_iter().collect::<Result<Vec<_>, _>>()?;
    let count = images.len() * trials;
    let total: usize = images.iter().map(|s| s.successes).sum();
    let bit_total: f64 = images.iter().map(|s| s.bit_accuracy * s.trials as f64).sum();
    Ok(AccuracyReport {
        method: wm.name(),
        suite: suite.map(|s| s.name.clone()),
        capacity: cap,
        seed,
        corpus: corpus.id.clone(),
        trials_per_image: trials,
        count,
        accuracy: total as f64 / count as f64,
        bit_accuracy: bit_total / count as f64,
        images,
    })
}

/// Clean embed/extract accuracy.
pub fn eval_accuracy(
    wm: &dyn Watermarker,
    corpus: &Corpus,
    trials: usize,
    seed: u64,
    exec: &Executor,
) -> Result<AccuracyReport, HarnessError> {
    eval_with_role(wm, corpus, None, trials, seed, Role::First, exec)
}

/// Accuracy after `suite` is applied to each watermarked image.
pub fn eval_robustness(
    wm: &dyn Watermarker,
    corpus: &Corpus,
    suite: &AugmentationSuite,
    trials: usize,
    seed: u64,
    exec: &Executor,
) -> Result<AccuracyReport, HarnessError> {
    eval_with_role(wm, corpus, Some(suite), trials, seed, Role::First, exec)
}

/// Per-image success counts for one image of the coexistence experiment.
struct CoexCounts {
    first_alone: Vec<usize>,
    second_alone: Vec<usize>,
    after: Vec<usize>,
    with: Vec<usize>,
}

/// Every ordered pair, the row's watermark applied first.
///
/// On the diagonal the second watermark is the method's self-pair partner
/// when it has one.
#[allow(clippy::needless_range_loop)]
pub fn coexistence_matrix(
    methods: &[Arc<dyn Watermarker>],
    corpus: &Corpus,
    trials: usize,
    seed: u64,
    exec: &Executor,
) -> Result<CoexistenceMatrix, HarnessError> {
    check_trials(trials)?;
    if methods.is_empty() {
        return Err(HarnessError::Invalid("at least one method required".into()));
    }
    let k = methods.len();
    // column instances: the methods, then diagonal partners
    let partners: Vec<Option<Arc<dyn Watermarker>>> = methods.iter().map(|m| m.self_pair_partner()).collect();
    let second_of = |a: usize, b: usize| -> &Arc<dyn Watermarker> {
        match (&partners[a], a == b) {
            (Some(p), true) => p,
            _ => &methods[b],
        }
    };
    let per_image = exec.map(&corpus.images, |i, img| -> Result<CoexCounts, HarnessError> {
        let mut c = CoexCounts {
            first_alone: vec![0; k],
            second_alone: vec![0; k * k],
            after: vec![0; k * k],
            with: vec![0; k * k],
        };
        for t in 0..trials {
            let s1_seed = trial_seed(seed, i, t, Role::First);
            let s2_seed = trial_seed(seed, i, t, Role::Second);
            let mut second_alone_cache: Vec<Option<bool>> = vec![None; k];
            for a in 0..k {
                let wa = &methods[a];
                let s1 = secret_for(wa.capacity(), s1_seed);
                let x1 = wa.embed(img, &s1)?;
                c.first_alone[a] += score(&**wa, &x1, &s1)?.0 as usize;
                for b in 0..k {
                    let wb = second_of(a, b);
                    let s2 = secret_for(wb.capacity(), s2_seed);
                    let x2 = wb.embed(&x1, &s2)?;
                    c.after[a * k + b] += score(&**wa, &x2, &s1)?.0 as usize;
                    c.with[a * k + b] += score(&**wb, &x2, &s2)?.0 as usize;
                    let alone = if a == b && partners[a].is_some() {
                        score(&**wb, &wb.embed(img, &s2)?, &s2)?.0
                    } else {
                        match second_alone_cache[b] {
                            Some(v) => v,
                            None => {
                                let v = score(&**wb, &wb.embed(img, &s2)?, &s2)?.0;
                                second_alone_cache[b] = Some(v);
                                v
                            }
                        }
                    };
                    c.second_alone[a * k + b] += alone as usize;
                }
            }
        }
        Ok(c)
    });
    let per_image = per_image.into_iter().collect::<Result<Vec<_>, _>>()?;
    let count = corpus.len() * trials;
    let frac = |f: &dyn Fn(&CoexCounts) -> usize| per_image.iter().map(f).sum::<usize>() as f64 / count as f64;
    let mut cells = Vec::with_capacity(k * k);
    for a in 0..k {
        for b in 0..k {
            let idx = a * k + b;
            cells.push(CoexCell {
                first: methods[a].name(),
                second: second_of(a, b).name(),
                first_alone: frac(&|c| c.first_alone[a]),
                first_after_second: frac(&|c| c.after[idx]),
                second_with_first: frac(&|c| c.with[idx]),
                second_alone: frac(&|c| c.second_alone[idx]),
            });
        }
    }
    Ok(CoexistenceMatrix {
        methods: methods.iter().map(|m| m.name()).collect(),
        seed,
        corpus: corpus.id.clone(),
        trials_per_image: trials,
        count,
        cells,
    })
}

struct SweepCell {
    successes: usize,
    psnr_sum: f64,
    robust: Vec<usize>,
}

/// Both modes at every strength: accuracy, robustness per suite, mean PSNR.
///
/// Rows are ordered series first, then parallel, strengths in the given order.
pub fn tradeoff_sweep(
    template: &Ensemble,
    strengths: &[f64],
    corpus: &Corpus,
    suites: &[AugmentationSuite],
    trials: usize,
    seed: u64,
    exec: &Executor,
) -> Result<TradeoffReport, HarnessError> {
    check_trials(trials)?;
    if strengths.is_empty() {
        return Err(HarnessError::Invalid("at least one strength required".into()));
    }
    for s in suites {
        s.validate()?;
    }
    let cells_per_image = Mode::ALL.len() * strengths.len();
    let per_image = exec.map(&corpus.images, |i, img| -> Result<Vec<SweepCell>, HarnessError> {
        let mut cells: Vec<SweepCell> = (0..cells_per_image)
            .map(|_| SweepCell {
                successes: 0,
                psnr_sum: 0.0,
                robust: vec![0; suites.len()],
            })
            .collect();
        for t in 0..trials {
            let msg = secret_for(template.capacity(), trial_seed(seed, i, t, Role::Ensemble));
            let (m1, m2) = template.split_message(&msg)?;
            let (p1, p2) = standalone_psnrs(img, &**template.first(), &**template.second(), &m1, &m2)?;
            for (mi, mode) in Mode::ALL.into_iter().enumerate() {
                let ens = template.with_mode(mode);
                let composite = compose(mode, img, &**ens.first(), &**ens.second(), &m1, &m2)?;
                for (si, &s) in strengths.iter().enumerate() {
                    let cell = &mut cells[mi * strengths.len() + si];
                    let out = clip_to_target(&composite, img, clip_target(p1, p2, s))?;
                    cell.psnr_sum += psnr(&out, img)?.db();
                    cell.successes += score(&ens, &out, &msg)?.0 as usize;
                    for (k, suite) in suites.iter().enumerate() {
                        let aug_seed = trial_seed(seed, i, t * suites.len() + k, Role::Augment);
                        let aug = apply_suite(&out, suite, aug_seed)?;
                        cell.robust[k] += score(&ens, &aug, &msg)?.0 as usize;
                    }
                }
            }
        }
        Ok(cells)
    });
    let per_image = per_image.into_iter().collect::<Result<Vec<_>, _>>()?;
    let count = corpus.len() * trials;
    let mut rows = Vec::with_capacity(cells_per_image);
    for (mi, mode) in Mode::ALL.into_iter().enumerate() {
        for (si, &s) in strengths.iter().enumerate() {
            let idx = mi * strengths.len() + si;
            let successes: usize = per_image.iter().map(|c| c[idx].successes).sum();
            let psnr_sum: f64 = per_image.iter().map(|c| c[idx].psnr_sum).sum();
            rows.push(TradeoffRow {
                mode: mode.to_string(),
                strength: s,
                capacity: template.capacity(),
                accuracy: successes as f64 / count as f64,
                mean_psnr: psnr_sum / count as f64,
                robustness: suites
                    .iter()
                    .enumerate()
                    .map(|(k, su)| SuiteScore {
                        suite: su.name.clone(),
                        accuracy: per_image.iter().map(|c| c[idx].robust[k]).sum::<usize>() as f64
                            / count as f64,
                    })
                    .collect(),
            });
        }
    }
    Ok(TradeoffReport {
        ensemble: template.name(),
        seed,
        corpus: corpus.id.clone(),
        trials_per_image: trials,
        count,
        suites: suites.iter().map(|s| s.name.clone()).collect(),
        rows,
    })
}

/// Unclipped series and parallel PSNR for each image (one message per image).
pub fn psnr_distribution(
    template: &Ensemble,
    corpus: &Corpus,
    seed: u64,
    threshold: f64,
    exec: &Executor,
) -> Result<PsnrDistribution, HarnessError> {
    let per_image = exec.map(&corpus.images, |i, img| -> Result<(f64, f64), HarnessError> {
        let msg = secret_for(template.capacity(), trial_seed(seed, i, 0, Role::Ensemble));
        let (m1, m2) = template.split_message(&msg)?;
        let (a, b) = (&**template.first(), &**template.second());
        let s = compose(Mode::Series, img, a, b, &m1, &m2)?;
        let p = compose(Mode::Parallel, img, a, b, &m1, &m2)?;
        Ok((psnr(&s, img)?.db(), psnr(&p, img)?.db()))
    });
    let pairs = per_image.into_iter().collect::<Result<Vec<_>, _>>()?;
    let n = pairs.len() as f64;
    let (series, parallel): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
    let above = |v: &[f64]| v.iter().filter(|&&x| x >= threshold).count() as f64 / n;
    Ok(PsnrDistribution {
        ensemble: format!("{}+{}", template.first().name(), template.second().name()),
        seed,
        corpus: corpus.id.clone(),
        images: corpus.names.clone(),
        mean_series: series.iter().sum::<f64>() / n,
        mean_parallel: parallel.iter().sum::<f64>() / n,
        threshold,
        frac_series_above: above(&series),
        frac_parallel_above: above(&parallel),
        series,
        parallel,
    })
}
