use std::hint::black_box;

use cgmysv_bench::{spx_env, spx_params};
use cgmysv_core::density::{cdf_from_cf, InversionGrid};
use cgmysv_core::pricing::{fft_european, lsm_american, spot_paths, FftConfig, LsmConfig, PathConfig};
use cgmysv_core::{cgmysv_cf, generate_paths, OptionSpec, Right, SimConfig, Style};
use criterion::{criterion_group, criterion_main, Criterion};
use num_complex::Complex64;

fn paths(c: &mut Criterion) {
    let p = spx_params();
    let mut g = c.benchmark_group("paths");
    g.sample_size(10);
    for j in [256usize, 1024] {
        let cfg = SimConfig::new(25.0 / 252.0, 25, 1000, j, 1);
        g.bench_function(format!("1000x25 J={j}"), |b| b.iter(|| generate_paths(black_box(&p), &cfg).unwrap()));
    }
    g.finish();
}

fn transforms(c: &mut Criterion) {
    let p = spx_params();
    let env = spx_env();
    c.bench_function("cf single point", |b| {
        b.iter(|| cgmysv_cf(black_box(&p), Complex64::new(7.0, -2.25), 28.0 / 365.0).unwrap())
    });
    let strikes: Vec<f64> = (0..21).map(|i| 2488.11 * (0.8 + 0.02 * i as f64)).collect();
    c.bench_function("fft 21 strikes", |b| {
        b.iter(|| fft_european(&p, &env, Right::Call, 28.0 / 365.0, black_box(&strikes), &FftConfig::default()).unwrap())
    });
    let cf = |u: f64| cgmysv_cf(&p, Complex64::new(u, 0.0), 0.1);
    let grid = InversionGrid::auto(cf).unwrap();
    let mut g = c.benchmark_group("density");
    g.sample_size(10);
    g.bench_function("cdf inversion", |b| b.iter(|| cdf_from_cf(cf, black_box(&grid)).unwrap()));
    g.finish();
}

fn lsm(c: &mut Criterion) {
    let p = spx_params();
    let env = spx_env();
    let t = 28.0 / 365.0;
    let cfg = PathConfig {
        maturity: t,
        steps: 28,
        paths: 5000,
        truncation: 512,
        seed: 4,
    };
    let sp = spot_paths(&p, &env, &cfg).unwrap();
    let spec = OptionSpec::european(2500.0, t, Right::Put).with_style(Style::American);
    let mut g = c.benchmark_group("lsm");
    g.sample_size(20);
    g.bench_function("5000 paths x 28 dates", |b| {
        b.iter(|| lsm_american(black_box(&sp), &spec, &env, &LsmConfig::default()).unwrap())
    });
    g.finish();
}

criterion_group!(benches, paths, transforms, lsm);
criterion_main!(benches);
