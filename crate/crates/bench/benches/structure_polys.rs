use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use wittbox::witt::{clear_structure_cache, witt_prod_polys, witt_sum_polys, DEFAULT_TERM_BUDGET};

fn sums(c: &mut Criterion) {
    let mut group = c.benchmark_group("witt_sum_polys");
    for (p, r, nmax) in [(2u64, 2usize, 3usize), (2, 4, 3), (3, 3, 2), (5, 2, 2)] {
        group.bench_function(format!("p{p}_r{r}_n{nmax}"), |b| {
            b.iter_batched(
                clear_structure_cache,
                |()| witt_sum_polys(p, r, nmax, DEFAULT_TERM_BUDGET).unwrap(),
                BatchSize::SmallInput,
            )
        });
    }
    group.finish();
}

fn products(c: &mut Criterion) {
    let mut group = c.benchmark_group("witt_prod_polys");
    for (p, nmax) in [(2u64, 3usize), (3, 2)] {
        group.bench_function(format!("p{p}_n{nmax}"), |b| {
            b.iter_batched(
                clear_structure_cache,
                |()| witt_prod_polys(p, nmax, DEFAULT_TERM_BUDGET).unwrap(),
                BatchSize::SmallInput,
            )
        });
    }
    group.finish();
}

criterion_group!(benches, sums, products);
criterion_main!(benches);
