use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use flexcurv::quadrature::gauss_legendre;
use flexcurv::variation::variation_report;
use flexcurv::{construct_flex_numeric, Expression, QuadratureSpec, VariationSpec};
use flexcurv_bench::{flex, surface};

fn jets(c: &mut Criterion) {
    let e = Expression::parse("sin(u*v) + exp(u/2)*log(2 + v) - sqrt(3 - u^2 - v^2)").unwrap();
    c.bench_function("expression jet", |b| {
        b.iter(|| e.eval_jet2(black_box(0.3), black_box(-0.4)).unwrap())
    });
}

fn quadrature(c: &mut Criterion) {
    let mut g = c.benchmark_group("gauss-legendre nodes");
    for n in [16, 64, 256] {
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| gauss_legendre(black_box(n)))
        });
    }
    g.finish();

    let cap = surface("cap-1-0.5");
    let mut g = c.benchmark_group("cap total mean curvature");
    for n in [16, 64] {
        let q = QuadratureSpec::new(n).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(n), &q, |b, q| {
            b.iter(|| cap.total_mean_curvature(q).unwrap())
        });
    }
    g.finish();
}

fn variation(c: &mut Criterion) {
    let para = surface("paraboloid");
    let twist = flex(&para, "para-twist");
    let spec = VariationSpec::default();
    c.bench_function("variation report, paraboloid twist", |b| {
        b.iter(|| variation_report(&para, &twist, &spec).unwrap())
    });
}

fn construct(c: &mut Criterion) {
    let para = surface("paraboloid");
    let mut g = c.benchmark_group("construct flex");
    g.sample_size(10);
    for n in [6, 10] {
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| construct_flex_numeric(&para, n, n).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, jets, quadrature, variation, construct);
criterion_main!(benches);
