use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use vasslyze::decompose::{classify, classify_general, max_qrf};
use vasslyze::generate::corpus_vass;
use vasslyze::linear::analyze_linear;
use vasslyze::oracle::{termination_curve, DEFAULT_MEMO_CAP, DEFAULT_STEP_CAP};
use vasslyze::samples::{counter_program, shared_flag_system, COUNTER_PROGRAM};
use vasslyze_cli::{analyze_source, verify_files};

fn linear(c: &mut Criterion) {
    let counter = counter_program();
    let flag = shared_flag_system();
    c.bench_function("linear_lp/counter_program", |b| {
        b.iter(|| analyze_linear(black_box(&counter)))
    });
    c.bench_function("linear_lp/shared_flag", |b| {
        b.iter(|| analyze_linear(black_box(&flag)))
    });
    c.bench_function("max_qrf/shared_flag", |b| {
        b.iter(|| max_qrf(black_box(&flag)))
    });
}

fn classification(c: &mut Criterion) {
    let flag = shared_flag_system();
    c.bench_function("classify/shared_flag", |b| {
        b.iter(|| classify(black_box(&flag)))
    });
    let corpus: Vec<_> = (0..20).map(corpus_vass).collect();
    c.bench_function("classify_general/corpus_20", |b| {
        b.iter(|| {
            for v in &corpus {
                black_box(classify_general(v));
            }
        })
    });
    c.bench_function("analyze_and_verify/counter_program", |b| {
        b.iter(|| {
            let (_, _, json) = analyze_source(COUNTER_PROGRAM, 1).unwrap();
            verify_files(&serde_json::to_string(&json).unwrap(), COUNTER_PROGRAM)
        })
    });
}

fn oracle(c: &mut Criterion) {
    let flag = shared_flag_system();
    let mut g = c.benchmark_group("oracle");
    g.sample_size(10);
    g.bench_function("curve/shared_flag_12", |b| {
        b.iter(|| termination_curve(black_box(&flag), 12, DEFAULT_STEP_CAP, DEFAULT_MEMO_CAP))
    });
    g.finish();
}

criterion_group!(benches, linear, classification, oracle);
criterion_main!(benches);
