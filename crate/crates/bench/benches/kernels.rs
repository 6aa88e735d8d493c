use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use polymer_bench::{burke_entry, draws, SEED};
use polymer_core::lattice::{simulate_ordered, FillOrder};
use polymer_core::maps::identities;
use polymer_core::stattest::ks::{ks_statistic, ks_two_sample_statistic};

fn lattice(c: &mut Criterion) {
    let mut g = c.benchmark_group("lattice");
    for key in ["t42-a", "t45-d-cont", "t45-d-disc"] {
        let e = burke_entry(key);
        for order in [FillOrder::Rows, FillOrder::AntiDiagonals] {
            g.bench_with_input(BenchmarkId::new(format!("{key}-{order:?}"), 200), &order, |b, &o| {
                b.iter(|| simulate_ordered(&e.model, 200, 200, &e.boundary, SEED, o).unwrap())
            });
        }
    }
    g.finish();
}

fn ks(c: &mut Criterion) {
    let e = burke_entry("t42-a");
    let a = draws(&e.boundary.mu, 100_000);
    let b = draws(&e.boundary.nu, 100_000);
    c.bench_function("ks one-sample 1e5", |bch| bch.iter(|| ks_statistic(&a, |x| e.boundary.mu.cdf(x))));
    c.bench_function("ks two-sample 1e5", |bch| bch.iter(|| ks_two_sample_statistic(&a, &b)));
}

fn identity(c: &mut Criterion) {
    let id = identities::get("p31a").unwrap();
    c.bench_function("identity p31a 1e4", |b| b.iter(|| id.check(10_000, SEED).unwrap()));
}

criterion_group!(benches, lattice, ks, identity);
criterion_main!(benches);
