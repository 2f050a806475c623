use num_rational::BigRational;
use vreg_core::dualization::Opposite;
use vreg_core::heisenberg::{FockIntertwiner, FockModule, Heisenberg};
use vreg_core::regrep::{
    build_pz_map, l0_eigenvalue, peter_weyl_functional, pz_membership, scale_functional, uniform_k_bound, verify_hom_property,
    verify_intertwining_map, verify_scaling, verify_sigma, weight_k_bound, Factor, PwRoute, PzContext, PzFunctional, RightSide,
    SearchBounds,
};
use vreg_core::scalars::{q64, qi, FieldConfig, PhaseKind, Scalar};
use vreg_core::voa_core::{GradedSpace, GradedVector, Voa};

fn bounds() -> SearchBounds {
    SearchBounds { l_max: 3, k_max: 3, depth: 2 }
}

#[test]
fn intertwining_map_both_directions() {
    let h = Heisenberg::new(12).unwrap();
    let m1 = FockModule::new(qi(1), q64(21, 2), 2).unwrap();
    let m2 = FockModule::new(qi(2), qi(12), 2).unwrap();
    let y = FockIntertwiner::new(qi(1), qi(1), qi(12), 2).unwrap();
    let field = FieldConfig::formal(2).unwrap();
    let ctx = PzContext::new(Opposite::on_dual(&h, &m2, &m2), field.clone(), bounds()).unwrap();
    let tests = m2.basis_upto(qi(5));
    let w1s = m1.basis_upto(q64(3, 2));
    for p in [0, 1] {
        let f = build_pz_map(&y, &field, p);
        for v in [h.vacuum(), h.a(), h.key(&[1, 1])] {
            for k1 in &w1s {
                for k2 in &w1s {
                    let (first, second) = (Factor { op: &m1, w: k1 }, Factor { op: &m1, w: k2 });
                    let r = verify_intertwining_map(&f, &ctx, &v, first, second, &tests, 4).unwrap();
                    assert!(r.pass(), "p={p} {v} {k1} {k2}: {:?}", r.failures);
                    let img = f.image_pz(&ctx, &GradedVector::basis(k1.clone()), &GradedVector::basis(k2.clone()));
                    let cert = pz_membership(&img, &v, &tests).unwrap().certificate.expect("membership");
                    assert!(cert.k <= weight_k_bound(&v, k1, m1.lowest_weight()), "{v} {k1}: k = {}", cert.k);
                    let r = verify_hom_property(&f, &ctx, &v, first, second, &tests, 4, RightSide::YR).unwrap();
                    assert!(r.pass(), "hom p={p} {v} {k1} {k2}: {:?}", r.failures);
                }
            }
        }
        let top = m1.top();
        let star = verify_hom_property(&f, &ctx, &h.a(), Factor { op: &m1, w: &top }, Factor { op: &m1, w: &top }, &tests, 4, RightSide::YStar)
            .unwrap();
        assert!(!star.pass());
        eprintln!("Y* substitution witness: {}", star.failures[0]);
        let mut bad = build_pz_map(&y, &field, p);
        bad.mutated = true;
        let r = verify_intertwining_map(&bad, &ctx, &h.a(), Factor { op: &m1, w: &top }, Factor { op: &m1, w: &top }, &tests, 4).unwrap();
        assert!(!r.pass());
        eprintln!("mutation witness: {}", r.failures[0]);
    }
    // Integer h: p and p + 1 agree.
    let f0 = build_pz_map(&y, &field, 0);
    let f1 = build_pz_map(&y, &field, 1);
    let (t, t2) = (GradedVector::basis(m1.top()), GradedVector::basis(m1.key(&[1])));
    for b in &tests {
        assert_eq!(f0.eval(&t, &t2, b).unwrap(), f1.eval(&t, &t2, b).unwrap());
    }
}

#[test]
fn branch_coherence_half_momenta() {
    let d = 8;
    let field = FieldConfig::formal(d).unwrap();
    let half = q64(1, 2);
    let m = FockModule::new(half, qi(6), d).unwrap();
    let m3 = FockModule::new(qi(1), qi(7), d).unwrap();
    let y = FockIntertwiner::new(half, half, qi(7), d).unwrap();
    let (f0, f1) = (build_pz_map(&y, &field, 0), build_pz_map(&y, &field, 1));
    let mut nonzero = 0;
    for k1 in m.basis_upto(q64(17, 8)) {
        for k2 in m.basis_upto(q64(17, 8)) {
            for b in m3.basis_upto(qi(4)) {
                let (w1, w2) = (GradedVector::basis(k1.clone()), GradedVector::basis(k2.clone()));
                let a0 = f0.eval(&w1, &w2, &b).unwrap();
                let a1 = f1.eval(&w1, &w2, &b).unwrap();
                let h = b.weight - k1.weight - k2.weight;
                let ratio = field.zeta_pow(2 * (h * qi(d as i64)).to_integer());
                assert_eq!(a1, a0.mul(&ratio));
                if !a0.is_zero() {
                    nonzero += 1;
                    assert_ne!(a0, a1);
                }
            }
        }
    }
    assert!(nonzero > 10);
}

#[test]
fn peter_weyl_functionals() {
    let h = Heisenberg::new(18).unwrap();
    let field = FieldConfig::formal(2).unwrap();
    let vac = GradedVector::basis(h.vacuum());
    let a = GradedVector::basis(h.a());
    let keys = h.basis_upto(qi(6));
    let phi = peter_weyl_functional(&h, &h, &h, &vac, &vac, &field, 0, PwRoute::DualL1).unwrap();
    for v in &keys {
        assert_eq!(phi.eval(v).unwrap(), if *v == h.vacuum() { Scalar::one() } else { Scalar::zero() });
    }
    for (w, wp) in [(a.clone(), a.clone()), (GradedVector::basis(h.key(&[2])), a.clone()), (a.clone(), GradedVector::basis(h.key(&[1, 1])))] {
        let one = peter_weyl_functional(&h, &h, &h, &w, &wp, &field, 0, PwRoute::DualL1).unwrap();
        let two = peter_weyl_functional(&h, &h, &h, &w, &wp, &field, 0, PwRoute::MovedLm1).unwrap();
        for v in &keys {
            assert_eq!(one.eval(v).unwrap(), two.eval(v).unwrap(), "{v}");
        }
        let next = peter_weyl_functional(&h, &h, &h, &w, &wp, &field, 1, PwRoute::DualL1).unwrap();
        let wt = w.weight().unwrap();
        let ratio = field
            .branch_phase(-wt * qi(2), 1, PhaseKind::LogBranch)
            .unwrap()
            .div(&field.branch_phase(-wt * qi(2), 0, PhaseKind::LogBranch).unwrap())
            .unwrap();
        for v in &keys {
            assert_eq!(next.eval(v).unwrap(), one.eval(v).unwrap().mul(&ratio));
        }
    }
    // Membership with the weight bound and the L(0) eigenvalues.
    let ctx = PzContext::new(Opposite::new(&h, &h, &h), field.clone(), SearchBounds { l_max: 5, k_max: 5, depth: 2 }).unwrap();
    for (w, wp) in [(h.a(), h.a()), (h.key(&[2]), h.key(&[1, 1]))] {
        let base = peter_weyl_functional(&h, &h, &h, &GradedVector::basis(w.clone()), &GradedVector::basis(wp.clone()), &field, 0, PwRoute::DualL1)
            .unwrap();
        let alpha = PzFunctional::new(ctx.clone(), base);
        let tests = h.basis_upto(qi(4));
        for v in [h.a(), h.key(&[1, 1]), h.key(&[2])] {
            let cert = pz_membership(&alpha, &v, &tests).unwrap().certificate.unwrap();
            assert!(cert.k <= weight_k_bound(&v, &w, qi(0)), "{v}: {cert:?}");
        }
        let (el, rl) = l0_eigenvalue(&alpha, true, &tests).unwrap();
        let (er, rr) = l0_eigenvalue(&alpha, false, &tests).unwrap();
        assert!(rl.pass() && rr.pass());
        assert_eq!(el.unwrap(), Scalar::from_q64(w.weight));
        assert_eq!(er.unwrap(), Scalar::from_q64(wp.weight));
    }
}

#[test]
fn uniform_k_after_one_mode() {
    let h = Heisenberg::new(20).unwrap();
    let field = FieldConfig::formal(1).unwrap();
    let ctx = PzContext::new(Opposite::new(&h, &h, &h), field.clone(), bounds()).unwrap();
    let a = GradedVector::basis(h.a());
    let alpha = PzFunctional::new(ctx, peter_weyl_functional(&h, &h, &h, &a, &a, &field, 0, PwRoute::DualL1).unwrap());
    let tests = h.basis_upto(qi(3));
    let gens = [h.a(), h.key(&[1, 1])];
    for v in &gens {
        for u in &gens {
            let bound = uniform_k_bound(&alpha, v, u, &tests).unwrap();
            for n in -3..=3 {
                let moved = alpha.star(&GradedVector::basis(v.clone()), n).unwrap();
                let m = pz_membership(&moved.with_bounds(nested()), u, &tests).unwrap();
                let cert = m.certificate.unwrap_or_else(|| panic!("{v} {u} {n}: {:?}", m.witness));
                assert!(cert.k <= bound, "{v} {u} {n}: {} > {bound}", cert.k);
            }
        }
    }
}

fn nested() -> SearchBounds {
    SearchBounds { l_max: 6, k_max: 6, depth: 2 }
}

fn concrete(z: i64) -> FieldConfig {
    FieldConfig::concrete_z(1, BigRational::from_integer(z.into())).unwrap()
}

#[test]
fn scaling_and_refutation() {
    let h = Heisenberg::new(28).unwrap();
    let (f1, f2) = (concrete(1), concrete(2));
    let src = PzContext::new(Opposite::new(&h, &h, &h), f1.clone(), bounds()).unwrap();
    let dst = PzContext::new(Opposite::new(&h, &h, &h), f2.clone(), bounds()).unwrap();
    let a = GradedVector::basis(h.a());
    let base = peter_weyl_functional(&h, &h, &h, &a, &a, &f1, 0, PwRoute::DualL1).unwrap();
    let alpha = PzFunctional::new(src.clone(), base.clone());
    let tests = h.basis_upto(qi(4));
    for v in [h.a(), h.key(&[1, 1])] {
        assert!(pz_membership(&alpha, &v, &tests).unwrap().certificate.is_some());
    }
    let beta = scale_functional(&alpha, &dst, &f2, 0);
    for v in [h.a(), h.key(&[1, 1])] {
        let cert = pz_membership(&beta, &v, &tests).unwrap().certificate.unwrap();
        assert!(cert.k > 0);
        let r = verify_scaling(&alpha, &beta, &f2, 0, &v, &tests, 3).unwrap();
        assert!(r.pass(), "{:?}", r.failures);
    }
    let r = verify_sigma(&alpha, &dst, &f2, 0, &h.a(), &h.a(), &h.basis_upto(qi(3)), 3, nested()).unwrap();
    assert!(r.pass(), "{:?}", r.failures);
    let wrong = PzFunctional::new(dst, base);
    let m = pz_membership(&wrong, &h.a(), &tests).unwrap();
    assert!(m.certificate.is_none());
    eprintln!("refutation witness: {}", m.witness.unwrap());
}
