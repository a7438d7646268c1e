use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;
use wmx_core::augment::SuiteName;
use wmx_core::harness::{eval_accuracy, eval_robustness, Corpus, Executor};
use wmx_core::watermark::default_watermarker;
use wmx_core::MethodId;

fn executors() -> Vec<(&'static str, Executor)> {
    let mut v = vec![("sequential", Executor::sequential())];
    if cfg!(feature = "parallel") {
        v.push(("parallel", Executor::new(0)));
    }
    v
}

fn accuracy(c: &mut Criterion) {
    let corpus = Corpus::synthetic(8, 128, 1).unwrap();
    let mut g = c.benchmark_group("eval_accuracy");
    g.sample_size(10);
    for method in [MethodId::Dwt, MethodId::SpreadSpectrum] {
        let wm = default_watermarker(method);
        for (label, exec) in executors() {
            g.bench_with_input(BenchmarkId::new(label, method), &exec, |b, exec| {
                b.iter(|| black_box(eval_accuracy(&*wm, &corpus, 2, 7, exec).unwrap()))
            });
        }
    }
    g.finish();
}

fn robustness(c: &mut Criterion) {
    let corpus = Corpus::synthetic(8, 128, 2).unwrap();
    let wm = default_watermarker(MethodId::DwtDctSvd);
    let suite = SuiteName::TrustmarkMedium.suite();
    let mut g = c.benchmark_group("eval_robustness");
    g.sample_size(10);
    for (label, exec) in executors() {
        g.bench_with_input(BenchmarkId::new(label, "trustmark_medium"), &exec, |b, exec| {
            b.iter(|| black_box(eval_robustness(&*wm, &corpus, &suite, 1, 7, exec).unwrap()))
        });
    }
    g.finish();
}

criterion_group!(benches, accuracy, robustness);
criterion_main!(benches);
