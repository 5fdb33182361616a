//! Sequential against parallel execution for the three sampling engines.
//! Both modes produce bit-identical results; only wall time differs. Build
//! with `--no-default-features` to compare against the rayon-free build.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use hyperlevel::exec::Execution;
use hyperlevel::holo::{random_poly, LevelFunction};
use hyperlevel::integrate::{integrate_ball_hyperbolic, McConfig};
use hyperlevel::norms::{norm_pow, SpaceParams};
use hyperlevel::rearrange::{polya_szego_check, TruncatedField};
use hyperlevel::superlevel::distribution_function;
use std::hint::black_box;

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn cfg(samples: usize, mode: Execution) -> McConfig {
    McConfig::new(42, samples, 64).unwrap().with_execution(mode)
}

fn norms(c: &mut Criterion) {
    let f = random_poly(3, 2, 42, 0);
    let params = SpaceParams::bergman(2, 2.0, 3.0).unwrap();
    let mut g = c.benchmark_group("bergman_norm");
    for (name, mode) in MODES {
        let cfg = cfg(20_000, mode);
        g.bench_function(BenchmarkId::new(name, 20_000), |b| b.iter(|| norm_pow(black_box(&f), &params, &cfg).unwrap()));
    }
    g.finish();
}

fn distribution(c: &mut Criterion) {
    let u = LevelFunction::hardy(random_poly(3, 2, 42, 1), 1.0).unwrap();
    let mut g = c.benchmark_group("distribution_function");
    g.sample_size(10);
    for (name, mode) in MODES {
        let cfg = cfg(1_000, mode);
        g.bench_function(BenchmarkId::new(name, 1_000), |b| b.iter(|| distribution_function(black_box(&u), &[], &cfg).unwrap()));
    }
    g.finish();
}

fn hyperbolic_volume(c: &mut Criterion) {
    let field = hyperlevel::geometry::FnField::new(2, |z: &[hyperlevel::Complex64]| {
        let s: f64 = z.iter().map(|w| w.norm_sqr()).sum();
        if s < 0.5 {
            1.0
        } else {
            0.0
        }
    })
    .with_support(0.75);
    let mut g = c.benchmark_group("hyperbolic_volume");
    g.sample_size(10);
    for (name, mode) in MODES {
        let cfg = cfg(10_000, mode);
        g.bench_function(BenchmarkId::new(name, 10_000), |b| b.iter(|| integrate_ball_hyperbolic(black_box(&field), &cfg).unwrap()));
    }
    g.finish();
}

fn polya_szego(c: &mut Criterion) {
    let w = LevelFunction::new(random_poly(3, 2, 42, 2), 2.0, 1.0).unwrap();
    let u = TruncatedField::of_level(w, 0.05, 42).unwrap();
    let mut g = c.benchmark_group("polya_szego");
    g.sample_size(10);
    for (name, mode) in MODES {
        let cfg = cfg(512, mode);
        g.bench_function(BenchmarkId::new(name, 512), |b| b.iter(|| polya_szego_check(black_box(&u), u.peak(), 2.0, &cfg).unwrap()));
    }
    g.finish();
}

criterion_group!(benches, norms, distribution, hyperbolic_volume, polya_szego);
criterion_main!(benches);
