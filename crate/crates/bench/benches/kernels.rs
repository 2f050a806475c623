use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;
use vreg_core::dualization::Opposite;
use vreg_core::heisenberg::Heisenberg;
use vreg_core::ratfun::{recognize_from_upper, RationalFn, RecognizeBounds};
use vreg_core::regrep::{peter_weyl_functional, pz_membership, PwRoute, PzContext, PzFunctional, SearchBounds};
use vreg_core::scalars::{qi, FieldConfig};
use vreg_core::voa_core::{borcherds_check, mode, GradedSpace, GradedVector, JacobiBox, StdTriple};

fn expansions(c: &mut Criterion) {
    let field = FieldConfig::formal(2).unwrap();
    let f = RationalFn::monomial(2, -3, field.z());
    c.bench_function("iota_infinity depth 16", |b| b.iter(|| black_box(&f).iota_infinity(&field, 16).unwrap()));
    let s = f.iota_infinity(&field, 16).unwrap();
    let bounds = RecognizeBounds { l_max: 3, k_max: 3, deg_max: 6, a_priori: None };
    c.bench_function("recognize x^2 (x - z)^-3", |b| b.iter(|| recognize_from_upper(&field, black_box(&s), &field.z(), bounds).unwrap()));
}

fn modes(c: &mut Criterion) {
    let h = Heisenberg::new(12).unwrap();
    let (u, w) = (h.key(&[2, 1]), h.key(&[3, 1, 1]));
    c.bench_function("heisenberg mode weight 3 on weight 5", |b| b.iter(|| mode(&h, black_box(&u), qi(1), &w).unwrap()));
    let t = StdTriple { y3: &h, yv: &h, y2: &h, y1: &h, low1: qi(0), low2: qi(0), u: h.a(), v: h.key(&[1, 1]), w: h.key(&[2]) };
    c.bench_function("jacobi box window 4", |b| b.iter(|| borcherds_check(&t, JacobiBox { window: 4, n0: qi(0) }).unwrap()));
}

fn membership(c: &mut Criterion) {
    let h = Heisenberg::new(20).unwrap();
    let field = FieldConfig::formal(2).unwrap();
    let a = GradedVector::basis(h.a());
    let base = peter_weyl_functional(&h, &h, &h, &a, &a, &field, 0, PwRoute::DualL1).unwrap();
    let tests = h.basis_upto(qi(4));
    let mut g = c.benchmark_group("membership");
    g.sample_size(10);
    g.bench_function("phi(a, a') at omega", |b| {
        b.iter(|| {
            let ctx = PzContext::new(Opposite::new(&h, &h, &h), field.clone(), SearchBounds { l_max: 3, k_max: 3, depth: 2 }).unwrap();
            let alpha = PzFunctional::new(ctx, base.clone());
            pz_membership(&alpha, &h.key(&[1, 1]), &tests).unwrap()
        })
    });
    g.finish();
}

criterion_group!(benches, expansions, modes, membership);
criterion_main!(benches);
