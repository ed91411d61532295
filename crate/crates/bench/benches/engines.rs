use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use pochette::{
    enumerate, find_noncyclic_quotient, invariant_factors, parse_presentation, smith_normal_form, spun_trefoil, tietze_simplify,
};
use pochette_bench::{matrices, one_fusion_surgeries};

fn smith(c: &mut Criterion) {
    let mut group = c.benchmark_group("smith_normal_form");
    for dim in [4, 6] {
        let ms = matrices(64, dim, 1);
        group.bench_with_input(BenchmarkId::from_parameter(dim), &ms, |b, ms| {
            b.iter(|| ms.iter().map(|m| smith_normal_form(black_box(m)).unwrap().rank()).sum::<usize>())
        });
    }
    group.finish();
    // dense inputs past 6x6 overflow the transforms; the factors alone go further
    let mut group = c.benchmark_group("invariant_factors");
    for dim in [6, 10, 14] {
        let ms = matrices(64, dim, 1);
        group.bench_with_input(BenchmarkId::from_parameter(dim), &ms, |b, ms| {
            b.iter(|| ms.iter().map(|m| invariant_factors(black_box(m)).unwrap().len()).sum::<usize>())
        });
    }
    group.finish();
}

fn coset_enumeration(c: &mut Criterion) {
    let icosahedral =
        parse_presentation("gens: r,s,t\nrels: r^2 t^-1 s^-1 r^-1; s^3 t^-1 s^-1 r^-1; t^5 t^-1 s^-1 r^-1").unwrap();
    c.bench_function("enumerate/binary_icosahedral", |b| {
        b.iter(|| enumerate(black_box(&icosahedral), &[], 100_000).index())
    });
    let family = one_fusion_surgeries(3, 5);
    c.bench_function("enumerate/one_fusion_p5_len3", |b| {
        b.iter(|| family.iter().filter_map(|p| enumerate(p, &[], 100_000).index()).sum::<usize>())
    });
    c.bench_function("tietze/one_fusion_p5_len3", |b| {
        b.iter(|| family.iter().map(|p| tietze_simplify(p, 10_000).steps).sum::<usize>())
    });
}

fn quotient_search(c: &mut Criterion) {
    let t = spun_trefoil();
    c.bench_function("quotients/spun_trefoil_noncyclic", |b| {
        b.iter(|| find_noncyclic_quotient(black_box(&t), 8).map(|a| a.degree))
    });
    // Z has only cyclic quotients, so the whole search space up to degree 5 is visited
    let z = parse_presentation("gens: x,y\nrels: x y^-1").unwrap();
    c.bench_function("quotients/exhaust_degree5", |b| {
        b.iter(|| find_noncyclic_quotient(black_box(&z), 5).is_none())
    });
}

criterion_group!(benches, smith, coset_enumeration, quotient_search);
criterion_main!(benches);
