use bandkh::chainmaps::long_exact_sequence_check;
use bandkh::morse::trefoil;
use bandkh::skein::kauffman_bracket_recursive;
use bandkh::{homology, kauffman_bracket, Coefficients, GradedComplex, SkeinTriple, StateSpace};
use bandkh_bench::{catalogue, diagram_with};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

fn complexes(c: &mut Criterion) {
    let mut g = c.benchmark_group("complex");
    for n in [3, 5, 7] {
        let d = diagram_with(&catalogue()[3], n, 7);
        g.bench_with_input(BenchmarkId::new("build", n), &d, |b, d| b.iter(|| GradedComplex::new(black_box(d))));
    }
    g.finish();
}

fn homologies(c: &mut Criterion) {
    let mut g = c.benchmark_group("homology");
    g.bench_function("trefoil", |b| {
        let cx = GradedComplex::new(&trefoil());
        b.iter(|| homology(black_box(&cx), Coefficients::Integer).unwrap())
    });
    for s in catalogue() {
        let d = diagram_with(&s, 6, 11);
        let cx = GradedComplex::new(&d);
        for coeff in [Coefficients::Integer, Coefficients::Mod2] {
            g.bench_with_input(BenchmarkId::new(format!("{s} {coeff}"), 6), &cx, |b, cx| {
                b.iter(|| homology(black_box(cx), coeff).unwrap())
            });
        }
    }
    g.finish();
}

fn brackets(c: &mut Criterion) {
    let mut g = c.benchmark_group("bracket");
    let d = diagram_with(&catalogue()[2], 8, 3);
    g.bench_function("state sum", |b| b.iter(|| kauffman_bracket(black_box(&d))));
    g.bench_function("recursive", |b| b.iter(|| kauffman_bracket_recursive(black_box(&d))));
    g.finish();
}

fn sequences(c: &mut Criterion) {
    let d = diagram_with(&catalogue()[4], 4, 5);
    let t = SkeinTriple::new(&d, 0).unwrap();
    c.bench_function("les check", |b| b.iter(|| long_exact_sequence_check(black_box(&t), Coefficients::Rational)));
    c.bench_function("state space", |b| b.iter(|| StateSpace::new(black_box(&d))));
}

criterion_group!(benches, complexes, homologies, brackets, sequences);
criterion_main!(benches);
