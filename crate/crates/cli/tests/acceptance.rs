//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fail.
//!
//! Runs with `harness = false` so the lines appear in `cargo test` output.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::sync::{Arc, OnceLock};
use wmx_core::augment::{apply_suite, SuiteName};
use wmx_core::ecc::{build_code, LinearCode};
use wmx_core::ensemble::{clip_target, clip_to_strength, psnr_clip, standalone_psnrs, Ensemble, Mode};
use wmx_core::harness::{
    coexistence_matrix, eval_accuracy, eval_robustness, psnr_distribution, synthetic_image, CoexistenceMatrix, Corpus,
    Executor,
};
use wmx_core::imgcore::psnr;
use wmx_core::toymodel::{brute_force_max_size, maximum_independent_set, quality_ball, watermark_sets, ConflictRule, ToyConfig};
use wmx_core::watermark::default_watermarker;
use wmx_core::{Image, MethodId, Residual, Secret, Watermarker, WatermarkerSpec};

const SEED: u64 = 2024;
const IMAGES: usize = 20;
const SIDE: usize = 256;
const TRIALS: usize = 10;

type Outcome = Result<String, String>;
type Criterion = (u32, &'static str, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn corpus() -> &'static Corpus {
    static C: OnceLock<Corpus> = OnceLock::new();
    C.get_or_init(|| Corpus::synthetic(IMAGES, SIDE, SEED).expect("synthetic corpus"))
}

fn exec() -> &'static Executor {
    static E: OnceLock<Executor> = OnceLock::new();
    E.get_or_init(|| Executor::new(0))
}

fn matrix() -> &'static CoexistenceMatrix {
    static M: OnceLock<CoexistenceMatrix> = OnceLock::new();
    M.get_or_init(|| {
        let methods: Vec<Arc<dyn Watermarker>> = MethodId::ALL.iter().map(|&m| default_watermarker(m)).collect();
        coexistence_matrix(&methods, corpus(), TRIALS, SEED, exec()).expect("coexistence matrix")
    })
}

fn distinct_pairs() -> Vec<(MethodId, MethodId)> {
    let m = MethodId::ALL;
    m.iter()
        .flat_map(|&a| m.iter().filter(move |&&b| b != a).map(move |&b| (a, b)))
        .collect()
}

fn all_messages(k: usize) -> impl Iterator<Item = Vec<bool>> {
    (0u64..1 << k).map(move |v| (0..k).map(|i| v >> i & 1 == 1).collect())
}

fn weight_patterns(n: usize, w: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, w: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == w {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, w, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, w, &mut Vec::new(), &mut out);
    out
}

fn c1_ecc_exhaustive() -> Outcome {
    let codes = [
        "repetition(3)",
        "repetition(5)",
        "repetition(8)",
        "hamming(3)",
        "extended_hamming(3)",
        "reed_muller_1(3)",
        "reed_muller_1(4)",
    ];
    let mut cases = 0usize;
    let mut failures = Vec::new();
    for expr in codes {
        let code = build_code(expr).map_err(|e| e.to_string())?;
        let t = (code.d() - 1) / 2;
        for msg in all_messages(code.k()) {
            let cw = code.encode(&msg).map_err(|e| e.to_string())?;
            for w in 0..=t {
                for flips in weight_patterns(code.n(), w) {
                    let mut rx = cw.clone();
                    for &p in &flips {
                        rx[p] = !rx[p];
                    }
                    cases += 1;
                    match code.decode(&rx) {
                        Ok(d) if d.message == msg => {}
                        other => failures.push(format!("{expr} {flips:?}: {other:?}")),
                    }
                }
            }
        }
    }
    check(
        failures.is_empty(),
        format!("{cases} (codeword, error pattern) cases, {} failures {:?}", failures.len(), failures.first()),
    )
}

/// Minimum weight over all nonzero codewords, by encoding every message.
fn brute_distance(code: &LinearCode) -> usize {
    all_messages(code.k())
        .skip(1)
        .map(|m| code.encode(&m).expect("encode").iter().filter(|&&b| b).count())
        .min()
        .unwrap_or(0)
}

fn c2_code_transforms() -> Outcome {
    let nkd = |c: &LinearCode| (c.n(), c.k(), c.d());
    let ext = build_code("extend(hamming(3))").map_err(|e| e.to_string())?;
    let pun = build_code("puncture(repetition(4),{3})").map_err(|e| e.to_string())?;
    let mut problems = Vec::new();
    if nkd(&ext) != (8, 4, 4) || !ext.d_verified() || brute_distance(&ext) != 4 {
        problems.push(format!("extend(hamming(3)) = {:?}", nkd(&ext)));
    }
    if nkd(&pun) != (3, 1, 3) || !pun.d_verified() || brute_distance(&pun) != 3 {
        problems.push(format!("puncture(repetition(4),{{3}}) = {:?}", nkd(&pun)));
    }
    // textbook parameters
    let mut table: Vec<(String, usize, usize, usize)> = Vec::new();
    for n in 2..=10 {
        table.push((format!("repetition({n})"), n, 1, n));
        table.push((format!("parity({n})"), n, n - 1, 2));
    }
    for m in 2..=4 {
        let n = (1 << m) - 1;
        table.push((format!("hamming({m})"), n, n - m, 3));
        table.push((format!("extended_hamming({m})"), n + 1, n - m, 4));
        table.push((format!("dual(hamming({m}))"), n, m, 1 << (m - 1)));
    }
    for m in 1..=7 {
        table.push((format!("reed_muller_1({m})"), 1 << m, m + 1, 1 << (m - 1)));
    }
    table.push(("cyclic(7,x^3+x+1)".into(), 7, 4, 3));
    table.push(("cyclic(15,x^4+x+1)".into(), 15, 11, 3));
    table.push(("shorten(hamming(4),{0..2})".into(), 12, 8, 3));
    table.push(("puncture(reed_muller_1(4),{0})".into(), 15, 5, 7));
    table.push(("extend(cyclic(7,x^3+x+1))".into(), 8, 4, 4));
    for (expr, n, k, d) in &table {
        match build_code(expr) {
            Ok(c) => {
                let bd = brute_distance(&c);
                if nkd(&c) != (*n, *k, *d) || bd != *d {
                    problems.push(format!("{expr}: built {:?}, brute d {bd}, expected [{n},{k},{d}]", nkd(&c)));
                }
            }
            Err(e) => problems.push(format!("{expr}: {e}")),
        }
    }
    check(
        problems.is_empty(),
        format!("[8,4,4] and [3,1,3] verified; {} codes with k <= 16 checked; problems {problems:?}", table.len()),
    )
}

fn c3_psnr_clip() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst: f64 = 0.0;
    let mut triggered = 0;
    let mut attempts = 0;
    while triggered < 50 {
        attempts += 1;
        if attempts > 1000 {
            return Err("could not draw 50 qualifying triples".into());
        }
        let img = synthetic_image(rng.random(), 64, 64);
        let sigma = rng.random_range(1.0..8.0);
        let noise: Vec<f64> = (0..img.len()).map(|_| rng.random_range(-sigma..sigma)).collect();
        let r = Residual::from_data(img.width(), img.height(), img.channels(), noise)
            .map_err(|e| e.to_string())?;
        let wm = img.apply_residual(&r, 1.0).map_err(|e| e.to_string())?;
        let before = psnr(&wm, &img).map_err(|e| e.to_string())?.db();
        // no-clip branch
        let loose = psnr_clip(&wm, &img, before - rng.random_range(0.0..5.0)).map_err(|e| e.to_string())?;
        if loose != wm {
            return Err("no-clip branch changed the image".into());
        }
        let target = before + rng.random_range(0.5..15.0);
        let factor = 10f64.powf(-(target - before) / 20.0);
        let clamps = img
            .data()
            .iter()
            .zip(r.data())
            .filter(|(v, d)| !(img.pixel_min()..=img.pixel_max()).contains(&(*v + factor * *d)))
            .count();
        if clamps * 1000 >= img.len() {
            continue;
        }
        triggered += 1;
        let after = psnr(&psnr_clip(&wm, &img, target).map_err(|e| e.to_string())?, &img)
            .map_err(|e| e.to_string())?
            .db();
        worst = worst.max((after - target).abs());
    }
    check(worst <= 0.05, format!("50 clipped triples, max |PSNR - target| = {worst:.2e} dB; no-clip branch bit-identical"))
}

fn c4_clip_endpoints() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut measured: f64 = 0.0;
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 4);
    for (i, (a, b)) in distinct_pairs().into_iter().enumerate() {
        let img = &corpus().images[i % IMAGES];
        let (w1, w2) = (WatermarkerSpec::new(a), WatermarkerSpec::new(b).with_key(7));
        let (m1, m2) = (Secret::random(32, &mut rng), Secret::random(32, &mut rng));
        let (p1, p2) = standalone_psnrs(img, &w1, &w2, &m1, &m2).map_err(|e| e.to_string())?;
        let (lo, hi) = (p1.db().min(p2.db()), p1.db().max(p2.db()));
        worst = worst
            .max((clip_target(p1, p2, 0.0) - lo).abs())
            .max((clip_target(p1, p2, 1.0) - hi).abs());
        let series = w2.embed(&w1.embed(img, &m1).map_err(|e| e.to_string())?, &m2).map_err(|e| e.to_string())?;
        let clipped = clip_to_strength(&series, img, 0.0, &w1, &w2, &m1, &m2).map_err(|e| e.to_string())?;
        let got = psnr(&clipped, img).map_err(|e| e.to_string())?.db();
        if got < lo {
            measured = measured.max(lo - got);
        }
    }
    check(
        worst <= 1e-6,
        format!("20 pairs: max |target - min/max standalone| = {worst:.2e} dB; strength-0 output shortfall {measured:.2e} dB"),
    )
}

fn c5_round_trip() -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for &m in &MethodId::ALL {
        let r = eval_accuracy(&*default_watermarker(m), corpus(), TRIALS, SEED, exec()).map_err(|e| e.to_string())?;
        ok &= r.accuracy >= 0.95 && r.count == IMAGES * TRIALS;
        parts.push(format!("{m} {:.3}", r.accuracy));
    }
    check(ok, format!("{IMAGES}x{TRIALS} trials, 32 bits: {}", parts.join(", ")))
}

fn c6_self_overwrite() -> Outcome {
    let m = matrix();
    let diag: Vec<(String, f64)> = (0..m.methods.len())
        .map(|i| (m.methods[i].clone(), m.cell(i, i).first_after_second))
        .collect();
    check(
        diag.iter().all(|(_, v)| *v <= 0.05),
        format!(
            "first-after-second on the diagonal: {}",
            diag.iter().map(|(n, v)| format!("{n} {v:.3}")).collect::<Vec<_>>().join(", ")
        ),
    )
}

fn coexisting_pairs() -> Vec<(usize, usize)> {
    let m = matrix();
    let n = m.methods.len();
    (0..n)
        .flat_map(|a| (0..n).map(move |b| (a, b)))
        .filter(|&(a, b)| a != b)
        .filter(|&(a, b)| {
            let c = m.cell(a, b);
            c.first_after_second >= 0.5 * c.first_alone
        })
        .collect()
}

fn c7_coexistence() -> Outcome {
    let n = matrix().methods.len();
    let total = n * (n - 1);
    let good = coexisting_pairs().len();
    let frac = good as f64 / total as f64;
    check(frac >= 0.4, format!("{good}/{total} ordered pairs keep >= half their standalone accuracy ({frac:.2})"))
}

fn ensemble(a: MethodId, b: MethodId, bits: (usize, usize), strength: Option<f64>, code: Option<&str>) -> Ensemble {
    Ensemble::new(
        Arc::new(WatermarkerSpec::new(a).with_capacity(bits.0)),
        Arc::new(WatermarkerSpec::new(b).with_capacity(bits.1).with_key(0xabc)),
        Mode::Series,
        strength,
        code.map(|c| build_code(c).expect("code")),
    )
    .expect("ensemble")
}

fn c8_capacity_addition() -> Outcome {
    let mut best = (0.0, String::new());
    for (a, b) in distinct_pairs() {
        let e = ensemble(a, b, (32, 32), None, None);
        if e.capacity() != 64 {
            return Err(format!("{} reports capacity {}", e.name(), e.capacity()));
        }
        let r = eval_accuracy(&e, corpus(), 5, SEED, exec()).map_err(|e| e.to_string())?;
        if r.accuracy > best.0 || best.1.is_empty() {
            best = (r.accuracy, e.name());
        }
    }
    check(best.0 >= 0.8, format!("64-bit uncoded ensembles; best {} at {:.3}", best.1, best.0))
}

fn c9_parallel_quality() -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for (a, b) in distinct_pairs() {
        let e = ensemble(a, b, (32, 32), None, None);
        let d = psnr_distribution(&e, corpus(), SEED, 40.0, exec()).map_err(|e| e.to_string())?;
        ok &= d.mean_parallel > d.mean_series;
        parts.push(format!("{a}+{b} {:.1}/{:.1}", d.mean_parallel, d.mean_series));
    }
    check(ok, format!("mean PSNR parallel/series: {}", parts.join(", ")))
}

fn c10_ecc_rescue() -> Outcome {
    let m = matrix();
    let pairs = coexisting_pairs();
    let preferred = (MethodId::DwtDctSvd, MethodId::SpreadSpectrum);
    let idx = |id: MethodId| m.methods.iter().position(|n| *n == id.to_string()).expect("method");
    let (a, b) = if pairs.contains(&(idx(preferred.0), idx(preferred.1))) {
        preferred
    } else {
        let &(i, j) = pairs.first().ok_or("no pair passes criterion 7")?;
        (MethodId::ALL[i], MethodId::ALL[j])
    };
    let suite = SuiteName::TrustmarkLow.suite();
    let strength = Some(0.0);
    let run = |code: Option<&str>| -> Result<(f64, usize), String> {
        let e = ensemble(a, b, (8, 8), strength, code);
        let r = eval_robustness(&e, corpus(), &suite, TRIALS, SEED, exec()).map_err(|e| e.to_string())?;
        Ok((r.accuracy, e.capacity()))
    };
    let (plain, k0) = run(None)?;
    let coded: Vec<(&str, f64, usize)> = ["extended_hamming(4)", "reed_muller_1(4)"]
        .into_iter()
        .map(|c| run(Some(c)).map(|(acc, k)| (c, acc, k)))
        .collect::<Result<_, _>>()?;
    let gain = coded.iter().any(|&(_, acc, _)| acc > plain);
    check(
        gain,
        format!(
            "{a}+{b} (8+8 bits, strength 0, trustmark_low): uncoded {plain:.3} [chance {:.1e}], {}",
            0.5f64.powi(k0 as i32),
            coded
                .iter()
                .map(|(c, acc, k)| format!("{c} {acc:.3} [chance {:.1e}]", 0.5f64.powi(*k as i32)))
                .collect::<Vec<_>>()
                .join(", ")
        ),
    )
}

fn wmx(args: &[&str], threads: &str) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_wmx"))
        .args(args)
        .env("WMX_THREADS", threads)
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!("wmx {args:?}: {}", String::from_utf8_lossy(&out.stderr)));
    }
    Ok(out.stdout)
}

fn c11_determinism() -> Outcome {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let dir = tmp.path().join("corpus");
    let dir_s = dir.to_str().ok_or("non-utf8 temp path")?;
    wmx(&["synth-corpus", "--count", "6", "--size", "128", "--seed", "11", "--dir", dir_s], "1")?;
    let runs: [&[&str]; 5] = [
        &["eval", "accuracy", "--methods", "dct,dwt,spread_spectrum", "--trials", "3"],
        &["eval", "robust", "--methods", "dwt,spread_spectrum", "--suites", "ssl,trustmark_low", "--trials", "2"],
        &["eval", "coexist", "--methods", "dct,dwtdctsvd,spread_spectrum", "--trials", "2"],
        &["eval", "tradeoff", "--first", "dct", "--second", "spread_spectrum", "--first-bits", "16", "--second-bits",
            "16", "--strengths", "0,0.5,1", "--suites", "rivagan"],
        &["eval", "psnr-dist", "--first", "dwt", "--second", "dct"],
    ];
    let mut bytes = 0;
    for r in runs {
        let mut outputs = Vec::new();
        for (i, threads) in ["1", "1", "8", "8"].iter().enumerate() {
            let csv = dir.join(format!("{}_{i}.csv", r[1]));
            let csv_s = csv.to_str().ok_or("non-utf8 temp path")?;
            let mut args = r.to_vec();
            args.extend(["--corpus", dir_s, "--seed", "5", "--out", csv_s]);
            wmx(&args, threads)?;
            outputs.push(std::fs::read(&csv).map_err(|e| e.to_string())?);
            std::fs::remove_file(&csv).map_err(|e| e.to_string())?;
        }
        if outputs.iter().any(|o| o != &outputs[0] || o.is_empty()) {
            return Err(format!("eval {} differs across runs or worker counts", r[1]));
        }
        bytes += outputs[0].len();
    }
    check(true, format!("5 eval subcommands x (2 runs at 1 worker, 2 at 8 workers): identical CSVs, {bytes} bytes"))
}

fn c12_toy() -> Outcome {
    let cube = |rule| ToyConfig::new(3, 1, 1, 3, 6.0, rule);
    let adj = watermark_sets(&cube(ConflictRule::Adjacent)).map_err(|e| e.to_string())?;
    let ball_rule = ConflictRule::BallOverlap { radius: 1 };
    let ball = watermark_sets(&cube(ball_rule)).map_err(|e| e.to_string())?;
    let four = ball.maximal_sets.iter().find(|s| s.size == 4);
    let mut agree = 0;
    let mut disagree = Vec::new();
    for psnr_db in [7.27, 8.0, 10.0, 12.0] {
        for rule in [ConflictRule::Adjacent, ball_rule, ConflictRule::BallOverlap { radius: 2 }] {
            let pts = quality_ball(&ToyConfig::new(3, 1, 1, 3, psnr_db, rule)).map_err(|e| e.to_string())?;
            if pts.len() > 20 {
                continue;
            }
            let (bb, bf) = (maximum_independent_set(&pts, rule).len(), brute_force_max_size(&pts, rule));
            if bb == bf {
                agree += 1;
            } else {
                disagree.push((psnr_db, rule.to_string(), bb, bf));
            }
        }
    }
    let ok = adj.ball_size == 27
        && adj.max_size == 14
        && four.is_some_and(|s| s.capacity_bits == 2.0)
        && disagree.is_empty()
        && agree > 0;
    check(
        ok,
        format!(
            "adjacency max {} ({:.3} bits); ball1 maximal size-4 set {:?} (2 bits), max {} ({:.3} bits); \
             branch-and-bound = subset enumeration on {agree} balls",
            adj.max_size,
            adj.capacity_bits,
            four.map(|s| &s.points),
            ball.max_size,
            ball.capacity_bits
        ),
    )
}

fn c13_augment() -> Outcome {
    let shape = |s: SuiteName| {
        let x = s.suite();
        (x.always.len(), x.pool.len())
    };
    let census = [
        (SuiteName::Rivagan, (3, 0)),
        (SuiteName::Ssl, (1, 5)),
        (SuiteName::TrustmarkLow, (2, 15)),
        (SuiteName::TrustmarkMedium, (2, 15)),
        (SuiteName::TrustmarkHigh, (2, 15)),
    ];
    for (s, want) in census {
        if shape(s) != want {
            return Err(format!("{s} has {:?} (always, pool), expected {want:?}", shape(s)));
        }
    }
    let img: Image = synthetic_image(SEED, 96, 80);
    let mut runs = 0;
    for s in SuiteName::ALL {
        let suite = s.suite();
        for seed in 0..40u64 {
            let a = apply_suite(&img, &suite, seed).map_err(|e| e.to_string())?;
            let b = apply_suite(&img, &suite, seed).map_err(|e| e.to_string())?;
            if a != b {
                return Err(format!("{s} seed {seed} not deterministic"));
            }
            if a.data().iter().any(|v| !(a.pixel_min()..=a.pixel_max()).contains(v)) {
                return Err(format!("{s} seed {seed} leaves pixel range"));
            }
            runs += 1;
        }
    }
    check(true, format!("census 3 / 1+5 / 2+15 matches; {runs} seeded runs bit-identical and in range"))
}

fn main() {
    let criteria: [Criterion; 13] = [
        (1, "ECC exhaustive correctness", c1_ecc_exhaustive),
        (2, "code transform parameters", c2_code_transforms),
        (3, "PSNR clip accuracy", c3_psnr_clip),
        (4, "clip-to-strength endpoints", c4_clip_endpoints),
        (5, "watermarker round trip", c5_round_trip),
        (6, "self-overwrite diagonal", c6_self_overwrite),
        (7, "cross-method coexistence", c7_coexistence),
        (8, "capacity addition", c8_capacity_addition),
        (9, "parallel vs series quality", c9_parallel_quality),
        (10, "ECC rescues ensembles", c10_ecc_rescue),
        (11, "determinism across worker counts", c11_determinism),
        (12, "toy model", c12_toy),
        (13, "augmentation census and determinism", c13_augment),
    ];
    let filter: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = 0;
    for (n, name, f) in criteria {
        if !filter.is_empty() && !filter.contains(&n) {
            continue;
        }
        let start = std::time::Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(d) => println!("PASS criterion {n:>2} ({name}): {d} [{secs:.1}s]"),
            Err(d) => {
                failed += 1;
                println!("FAIL criterion {n:>2} ({name}): {d} [{secs:.1}s]");
            }
        }
    }
    if failed > 0 {
        println!("{failed} criterion(s) failed");
        std::process::exit(1);
    }
}
