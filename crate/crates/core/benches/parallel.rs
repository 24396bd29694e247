use criterion::{criterion_group, criterion_main, Criterion};
use fracprog::netsim::{generate_siso_hex, ScenarioConfig, ScenarioKind};
use fracprog::numerics::RngStream;
use fracprog::par;
use fracprog::power::{pc_closed_form_solve, random_start, weighted_sum_rate, PowerVector};
use std::hint::black_box;

fn seven_cells() -> ScenarioConfig {
    let mut cfg = ScenarioConfig::defaults(ScenarioKind::SisoHex);
    cfg.cells = 7;
    cfg
}

fn multistart(c: &mut Criterion) {
    let cfg = seven_cells();
    let net = generate_siso_hex(&cfg, &mut RngStream::new(3)).unwrap();
    let base = RngStream::new(17);
    let run = |k: usize| {
        let p0 = random_start(&net, &mut base.fork(k as u64));
        let sol = pc_closed_form_solve(&net, &p0, 1e-6, 2_000).unwrap();
        weighted_sum_rate(&sol.p, &net)
    };
    let mut group = c.benchmark_group("multistart_16");
    group.sample_size(10);
    group.bench_function("rayon", |b| b.iter(|| black_box(par::map_range(16, run))));
    group.bench_function("sequential", |b| b.iter(|| black_box(par::map_range_sequential(16, run))));
    group.finish();
}

fn seed_sweep(c: &mut Criterion) {
    let cfg = seven_cells();
    let seeds: Vec<u64> = (0..16).collect();
    let run = |seed: &u64| {
        let net = generate_siso_hex(&cfg, &mut RngStream::new(*seed)).unwrap();
        let sol = pc_closed_form_solve(&net, &PowerVector::half_power(&net), 1e-6, 2_000).unwrap();
        weighted_sum_rate(&sol.p, &net)
    };
    let mut group = c.benchmark_group("seed_sweep_16");
    group.sample_size(10);
    group.bench_function("rayon", |b| b.iter(|| black_box(par::map(&seeds, run))));
    group.bench_function("sequential", |b| b.iter(|| black_box(par::map_sequential(&seeds, run))));
    group.finish();
}

criterion_group!(benches, multistart, seed_sweep);
criterion_main!(benches);
