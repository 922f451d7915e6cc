//! Per-limb work on the global rayon pool against a one-thread pool, which
//! runs the same code path as a build without the `parallel` feature.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use flexhe::heaan;
use flexhe::keys::{encrypt, sampling, Encoder, KeyGenerator};
use flexhe::params::{Context, ParamSet};
use flexhe::scale::Scale;

fn limbs(c: &mut Criterion) {
    let serial = rayon::ThreadPoolBuilder::new().num_threads(1).build().expect("one-thread pool");
    let mut group = c.benchmark_group("limbs");
    group.sample_size(10);
    for params in [ParamSet::set1(), ParamSet::set2()] {
        let ctx = Context::new(params).unwrap();
        let gen = KeyGenerator::new(&ctx, 1);
        let sk = gen.secret_key().unwrap();
        let pk = gen.public_key(&sk).unwrap();
        let keys = gen.eval_keys(&sk, &[]).unwrap();
        let enc = Encoder::new(ctx.degree()).unwrap();
        let delta = Scale::pow2(ctx.params().log_scale);
        let values: Vec<f64> = (0..enc.slots()).map(|j| (j % 17) as f64 / 17.0).collect();
        let pt = enc.encode_real(&values, &delta).unwrap();
        let mut rng = sampling::stream(2, 0);
        let a = encrypt(&ctx, &pk, &pt, ctx.max_level(), &mut rng).unwrap();
        let b = encrypt(&ctx, &pk, &pt, ctx.max_level(), &mut rng).unwrap();
        let name = ctx.params().name.clone();

        group.bench_function(BenchmarkId::new("mult_relin/rayon", &name), |bench| {
            bench.iter(|| heaan::mult_relin(&ctx, black_box(&a), black_box(&b), &keys).unwrap())
        });
        group.bench_function(BenchmarkId::new("mult_relin/sequential", &name), |bench| {
            bench.iter(|| serial.install(|| heaan::mult_relin(&ctx, black_box(&a), black_box(&b), &keys).unwrap()))
        });
        group.bench_function(BenchmarkId::new("rescale/rayon", &name), |bench| {
            bench.iter(|| heaan::rescale(&ctx, black_box(&a)).unwrap())
        });
        group.bench_function(BenchmarkId::new("rescale/sequential", &name), |bench| {
            bench.iter(|| serial.install(|| heaan::rescale(&ctx, black_box(&a)).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, limbs);
criterion_main!(benches);
