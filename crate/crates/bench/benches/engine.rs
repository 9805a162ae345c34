use criterion::{black_box, criterion_group, criterion_main, Criterion};
use ellchi_bench::{cold_engine, mixed_requests};

fn exact(c: &mut Criterion) {
    let mut g = c.benchmark_group("exact");
    g.sample_size(10);
    for n in [2, 3] {
        g.bench_function(format!("full_genfun({n}) cold"), |b| {
            b.iter(|| cold_engine().full_genfun(black_box(n)).unwrap())
        });
    }
    let warm = cold_engine();
    warm.full_genfun(3).unwrap();
    let reqs = mixed_requests(3, 4);
    g.bench_function("chi n = 3, warm, direct and dual", |b| {
        b.iter(|| {
            for r in &reqs {
                black_box(warm.chi(r).unwrap());
            }
        })
    });
    g.finish();
}

fn series(c: &mut Criterion) {
    let mut g = c.benchmark_group("series");
    g.sample_size(10);
    for n in [3, 5] {
        let orders = vec![8; n + 1];
        g.bench_function(format!("full_genfun_series({n}), total degree 8"), |b| {
            b.iter(|| {
                cold_engine()
                    .full_genfun_series(n, &orders, Some(8))
                    .unwrap()
            })
        });
    }
    g.finish();
}

criterion_group!(benches, exact, series);
criterion_main!(benches);
