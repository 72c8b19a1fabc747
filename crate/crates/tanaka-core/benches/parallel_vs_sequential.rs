use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use tanaka_core::fieldalg::PointQ;
use tanaka_core::flag::derived_flag;
use tanaka_core::gnla::{free_gnla, gnla_at};
use tanaka_core::models::{self, cartan_jet};
use tanaka_core::prolong::{tanaka_prolongation_with, ProlongOptions};
use tanaka_core::symcheck::{closure, is_symmetry_with};
use tanaka_core::Exec;

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn symbol(c: &mut Criterion) {
    let jm = cartan_jet(6).unwrap();
    let df = derived_flag(&jm.frame(), 16).unwrap();
    let o = PointQ::origin(jm.chart());
    let mut g = c.benchmark_group("gnla_at cartan_jet(6)");
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| b.iter(|| gnla_at(&df, &o, exec).unwrap()));
    }
    g.finish();
}

fn prolongation(c: &mut Criterion) {
    let a = free_gnla(3, 2).unwrap();
    let mut g = c.benchmark_group("prolongation free(3,2)");
    g.sample_size(10);
    for (name, exec) in MODES {
        let opts = ProlongOptions { max_degree: 4, exec, ..ProlongOptions::default() };
        g.bench_function(BenchmarkId::from_parameter(name), |b| b.iter(|| tanaka_prolongation_with(&a, &opts).unwrap()));
    }
    g.finish();
}

fn symmetries(c: &mut Criterion) {
    let (jm, sym) = models::e13_with_symmetries().unwrap();
    let frame = jm.frame();
    let fields: Vec<_> = sym.iter().map(|s| s.field.clone()).collect();
    let mut g = c.benchmark_group("e13 symmetries");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::new("check", name), |b| {
            b.iter(|| fields.iter().all(|f| is_symmetry_with(f, &frame, exec).unwrap()))
        });
        g.bench_function(BenchmarkId::new("closure", name), |b| b.iter(|| closure(&fields, &frame, exec).unwrap()));
    }
    g.finish();
}

criterion_group!(benches, symbol, prolongation, symmetries);
criterion_main!(benches);
