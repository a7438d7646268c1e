use crate::args::*;
use crate::{usage, CliError};
use anyhow::Context;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::io::Write;
use std::path::Path;
use std::sync::Arc;
use wmx_core::augment::apply_suite;
use wmx_core::ecc::{build_code, load_code_file, LinearCode};
use wmx_core::ensemble::{Ensemble, Mode};
use wmx_core::harness::{
    coexistence_matrix, combined_csv, combined_json, eval_accuracy, eval_robustness, psnr_distribution,
    tradeoff_sweep, Corpus, Executor, Report,
};
use wmx_core::imgcore::{export_residual, load_png, psnr, residual, save_png};
use wmx_core::toymodel::{toy_coexistence, watermark_sets, Point, ToyConfig};
use wmx_core::watermark::{Secret, Watermarker, WatermarkerSpec, DEFAULT_CAPACITY, DEFAULT_KEY};

type Out<'a> = &'a mut dyn Write;

pub fn run(cli: Cli, out: Out, err: Out) -> Result<(), CliError> {
    let exec = match cli.threads {
        Some(n) => Executor::new(n),
        None => Executor::from_env(),
    };
    match cli.command {
        Command::Embed(a) => embed(a, out, err),
        Command::Extract(a) => extract(a, out),
        Command::Ensemble(a) => ensemble_embed(a, out, err),
        Command::EnsembleExtract(a) => ensemble_extract(a, out, err),
        Command::Augment(a) => augment(a),
        Command::Residual(a) => export(a, out),
        Command::Eval(e) => eval(e, &exec, out),
        Command::Toy(a) => toy(a, out),
        Command::SynthCorpus(a) => synth(a, out),
    }
}

fn spec(method: wmx_core::watermark::MethodId, p: &MethodArgs) -> Result<WatermarkerSpec, CliError> {
    let mut s = WatermarkerSpec::new(method).with_capacity(p.capacity);
    if let Some(k) = p.key {
        s = s.with_key(k);
    }
    if let Some(v) = p.step {
        s = s.with_step(v);
    }
    if let Some(v) = p.alpha {
        s = s.with_strength(v);
    }
    if let Some(v) = p.block {
        s = s.with_block_size(v);
    }
    s.validate().map_err(|e| usage(e.to_string()))?;
    Ok(s)
}

fn secret(hex: Option<&str>, len: usize, seed: u64) -> Result<Secret, CliError> {
    match hex {
        Some(h) => Secret::from_hex_len(h, len).map_err(|e| usage(format!("--secret-hex: {e}"))),
        None => Ok(Secret::random(len, &mut ChaCha8Rng::seed_from_u64(seed))),
    }
}

fn load(path: &Path) -> anyhow::Result<wmx_core::Image> {
    load_png(path).with_context(|| format!("reading {}", path.display()))
}

fn save(img: &wmx_core::Image, path: &Path) -> anyhow::Result<()> {
    save_png(img, path).with_context(|| format!("writing {}", path.display()))
}

fn embed(a: EmbedArgs, out: Out, err: Out) -> Result<(), CliError> {
    let wm = spec(a.method, &a.params)?;
    let s = secret(a.secret_hex.as_deref(), wm.capacity(), a.seed)?;
    let cover = load(&a.input)?;
    let marked = wm.embed(&cover, &s)?;
    save(&marked, &a.out)?;
    writeln!(out, "{}", s.to_hex())?;
    writeln!(err, "psnr {}", psnr(&marked, &cover)?)?;
    Ok(())
}

fn extract(a: ExtractArgs, out: Out) -> Result<(), CliError> {
    let wm = spec(a.method, &a.params)?;
    let s = wm.extract(&load(&a.input)?)?;
    writeln!(out, "{}", s.to_hex())?;
    Ok(())
}

fn ensemble(pair: &PairArgs, mode: Mode, strength: Option<f64>) -> Result<Ensemble, CliError> {
    let code: Option<LinearCode> = match (&pair.ecc, &pair.ecc_file) {
        (Some(expr), _) => Some(build_code(expr).map_err(|e| usage(format!("--ecc: {e}")))?),
        (None, Some(path)) => Some(load_code_file(path)?),
        (None, None) => None,
    };
    let (m1, m2) = match (pair.first_bits, pair.second_bits, &code) {
        (Some(a), Some(b), _) => (a, b),
        (Some(a), None, Some(c)) => (a, c.n().saturating_sub(a)),
        (None, Some(b), Some(c)) => (c.n().saturating_sub(b), b),
        (None, None, Some(c)) => (c.n() - c.n() / 2, c.n() / 2),
        (a, b, None) => (a.unwrap_or(DEFAULT_CAPACITY), b.unwrap_or(DEFAULT_CAPACITY)),
    };
    let params = |bits, key| MethodArgs {
        capacity: bits,
        key: Some(key),
        step: None,
        alpha: None,
        block: None,
    };
    let first = spec(pair.first, &params(m1, pair.first_key.unwrap_or(DEFAULT_KEY)))?;
    let second = spec(pair.second, &params(m2, pair.second_key.unwrap_or(DEFAULT_KEY.wrapping_add(1))))?;
    Ensemble::new(Arc::new(first), Arc::new(second), mode, strength, code).map_err(|e| usage(e.to_string()))
}

fn ensemble_embed(a: EnsembleEmbedArgs, out: Out, err: Out) -> Result<(), CliError> {
    let ens = ensemble(&a.pair, a.mode, a.strength)?;
    let msg = secret(a.secret_hex.as_deref(), ens.effective_capacity(), a.seed)?;
    let cover = load(&a.input)?;
    let marked = ens.embed_message(&cover, &msg)?;
    save(&marked, &a.out)?;
    writeln!(out, "{}", msg.to_hex())?;
    writeln!(err, "psnr {}", psnr(&marked, &cover)?)?;
    Ok(())
}

fn ensemble_extract(a: EnsembleExtractArgs, out: Out, err: Out) -> Result<(), CliError> {
    let ens = ensemble(&a.pair, Mode::Series, None)?;
    let got = ens.extract_message(&load(&a.input)?)?;
    writeln!(out, "{}", got.message.to_hex())?;
    if ens.code().is_some() {
        writeln!(err, "corrections {}", got.corrections)?;
    }
    Ok(())
}

fn augment(a: AugmentArgs) -> Result<(), CliError> {
    let img = apply_suite(&load(&a.input)?, &a.suite.suite(), a.seed)?;
    save(&img, &a.out)?;
    Ok(())
}

fn export(a: ResidualArgs, out: Out) -> Result<(), CliError> {
    let original = load(&a.original)?;
    let marked = load(&a.watermarked)?;
    let r = residual(&marked, &original)?;
    save(&export_residual(&r, a.mode, a.gain)?, &a.out)?;
    writeln!(out, "psnr {}", psnr(&marked, &original)?)?;
    Ok(())
}

fn corpus(c: &CorpusArgs) -> Result<Corpus, CliError> {
    let cap = (c.max_dim > 0).then_some(c.max_dim);
    match (&c.corpus, c.synthetic) {
        (Some(dir), _) => Ok(Corpus::load_dir(dir, cap)?),
        (None, Some(n)) => Ok(Corpus::synthetic(n, c.size, 0)?),
        (None, None) => Err(usage("one of --corpus or --synthetic is required")),
    }
}

fn emit(csv: String, json: impl FnOnce() -> String, run: &RunArgs, out: Out) -> Result<(), CliError> {
    match &run.out {
        Some(p) => std::fs::write(p, &csv).with_context(|| format!("writing {}", p.display()))?,
        None => out.write_all(csv.as_bytes())?,
    }
    if let Some(p) = &run.json {
        std::fs::write(p, json()).with_context(|| format!("writing {}", p.display()))?;
    }
    Ok(())
}

fn emit_one<R: Report>(r: &R, run: &RunArgs, out: Out) -> Result<(), CliError> {
    emit(r.to_csv(), || r.to_json(), run, out)
}

fn emit_many<R: Report>(rs: &[R], run: &RunArgs, out: Out) -> Result<(), CliError> {
    emit(combined_csv(rs), || combined_json(rs), run, out)
}

/// Default sweep: -0.2 to 1.2 in steps of 0.2.
fn default_strengths() -> Vec<f64> {
    (0..8).map(|i| (i as f64 - 1.0) / 5.0).collect()
}

fn eval(cmd: EvalCommand, exec: &Executor, out: Out) -> Result<(), CliError> {
    match cmd {
        EvalCommand::Accuracy(a) => {
            let c = corpus(&a.run.corpus)?;
            let reports = a
                .methods
                .iter()
                .map(|&m| Ok(eval_accuracy(&spec(m, &a.params)?, &c, a.run.trials, a.run.seed, exec)?))
                .collect::<Result<Vec<_>, CliError>>()?;
            emit_many(&reports, &a.run, out)
        }
        EvalCommand::Robust(a) => {
            let c = corpus(&a.run.corpus)?;
            let mut reports = Vec::new();
            for &m in &a.methods {
                let wm = spec(m, &a.params)?;
                for s in &a.suites {
                    reports.push(eval_robustness(&wm, &c, &s.suite(), a.run.trials, a.run.seed, exec)?);
                }
            }
            emit_many(&reports, &a.run, out)
        }
        EvalCommand::Coexist(a) => {
            let c = corpus(&a.run.corpus)?;
            let methods = a
                .methods
                .iter()
                .map(|&m| Ok(Arc::new(spec(m, &a.params)?) as Arc<dyn Watermarker>))
                .collect::<Result<Vec<_>, CliError>>()?;
            emit_one(&coexistence_matrix(&methods, &c, a.run.trials, a.run.seed, exec)?, &a.run, out)
        }
        EvalCommand::Tradeoff(a) => {
            let template = ensemble(&a.pair, Mode::Series, None)?;
            let strengths = if a.strengths.is_empty() { default_strengths() } else { a.strengths.clone() };
            let suites: Vec<_> = a.suites.iter().map(|s| s.suite()).collect();
            let c = corpus(&a.run.corpus)?;
            let r = tradeoff_sweep(&template, &strengths, &c, &suites, a.run.trials, a.run.seed, exec)?;
            emit_one(&r, &a.run, out)
        }
        EvalCommand::PsnrDist(a) => {
            let template = ensemble(&a.pair, Mode::Series, None)?;
            let c = corpus(&a.run.corpus)?;
            emit_one(&psnr_distribution(&template, &c, a.run.seed, a.threshold, exec)?, &a.run, out)
        }
    }
}

fn parse_set(s: &str, dims: usize) -> Result<Vec<Point>, CliError> {
    s.split(';')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            let pt: Point = p
                .split(',')
                .map(|v| v.trim().parse::<usize>())
                .collect::<Result<_, _>>()
                .map_err(|e| usage(format!("bad point '{p}': {e}")))?;
            if pt.len() != dims {
                return Err(usage(format!("point '{p}' has {} coordinates, expected {dims}", pt.len())));
            }
            Ok(pt)
        })
        .collect()
}

fn toy(a: ToyArgs, out: Out) -> Result<(), CliError> {
    let (h, w) = a
        .size
        .split_once(['x', 'X'])
        .and_then(|(h, w)| Some((h.trim().parse().ok()?, w.trim().parse().ok()?)))
        .ok_or_else(|| usage(format!("--size must look like HxW, got '{}'", a.size)))?;
    let mut cfg = ToyConfig::new(a.channels, h, w, a.levels, a.min_psnr, a.rule);
    if !a.center.is_empty() {
        cfg.center = a.center.clone();
    }
    cfg.validate().map_err(|e| usage(e.to_string()))?;
    let report = watermark_sets(&cfg)?;
    let coexistence = match a.compose.as_slice() {
        [sa, sb] => Some(toy_coexistence(&parse_set(sa, cfg.dims())?, &parse_set(sb, cfg.dims())?, &cfg)?),
        _ => None,
    };
    let json = serde_json::to_string_pretty(&serde_json::json!({
        "sets": report,
        "coexistence": coexistence,
    }))?;
    writeln!(
        out,
        "rule {}: ball {} points, max set {} ({:.6} bits), {} maximal sets",
        report.rule, report.ball_size, report.max_size, report.capacity_bits, report.maximal_set_count
    )?;
    match &a.out {
        Some(p) => std::fs::write(p, json).with_context(|| format!("writing {}", p.display()))?,
        None => writeln!(out, "{json}")?,
    }
    Ok(())
}

fn synth(a: SynthArgs, out: Out) -> Result<(), CliError> {
    let c = Corpus::synthetic(a.count, a.size, a.seed)?;
    std::fs::create_dir_all(&a.dir).with_context(|| format!("creating {}", a.dir.display()))?;
    for (name, img) in c.names.iter().zip(&c.images) {
        save(img, &a.dir.join(format!("{name}.png")))?;
    }
    writeln!(out, "wrote {} images to {}", c.len(), a.dir.display())?;
    Ok(())
}
