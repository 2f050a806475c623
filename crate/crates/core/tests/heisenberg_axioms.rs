use std::time::Instant;

use vreg_core::heisenberg::{FockIntertwiner, FockModule, Heisenberg};
use vreg_core::scalars::{q64, qi, Scalar};
use vreg_core::voa_core::{
    borcherds_check, g_bracket, lie_act, mode_vec, three_point, verify_derivative, verify_vacuum, verify_virasoro, GradedSpace,
    GradedVector, JacobiBox, LieMode, StdTriple, Voa,
};

#[test]
fn jacobi_standard_weight_three_cutoff_eight() {
    let h = Heisenberg::new(8).unwrap();
    let basis = h.basis_upto(qi(3));
    let start = Instant::now();
    let mut checked = 0;
    let mut skipped = 0;
    for u in &basis {
        for v in &basis {
            for w in &basis {
                let t = StdTriple { y3: &h, yv: &h, y2: &h, y1: &h, low1: qi(0), low2: qi(0), u: u.clone(), v: v.clone(), w: w.clone() };
                let r = borcherds_check(&t, JacobiBox { window: 6, n0: qi(0) }).unwrap();
                assert!(r.failures.is_empty(), "{u} {v} {w}: {:?}", r.failures);
                checked += r.checked;
                skipped += r.skipped;
            }
        }
    }
    eprintln!("jacobi: {checked} monomials checked, {skipped} skipped, {:?}", start.elapsed());
    assert!(checked > 0);
}

#[test]
fn jacobi_module_and_intertwiner() {
    let h = Heisenberg::new(8).unwrap();
    let m = FockModule::new(qi(1), qi(8), 2).unwrap();
    let basis = h.basis_upto(qi(2));
    for u in &basis {
        for v in &basis {
            for w in m.basis_upto(q64(5, 2)) {
                let t = StdTriple { y3: &m, yv: &m, y2: &m, y1: &h, low1: qi(0), low2: q64(1, 2), u: u.clone(), v: v.clone(), w };
                let r = borcherds_check(&t, JacobiBox { window: 5, n0: qi(0) }).unwrap();
                assert!(r.pass() || r.checked == 0 && r.failures.is_empty(), "{r:?}");
            }
        }
    }
    let m11 = FockModule::new(qi(1), qi(7), 2).unwrap();
    let m2 = FockModule::new(qi(2), qi(7), 2).unwrap();
    let y = FockIntertwiner::new(qi(1), qi(1), qi(7), 2).unwrap();
    for u in h.basis_upto(qi(2)) {
        for v in m11.basis_upto(q64(5, 2)) {
            for w in m11.basis_upto(q64(5, 2)) {
                let t = StdTriple { y3: &m2, yv: &y, y2: &m11, y1: &m11, low1: q64(1, 2), low2: q64(1, 2), u: u.clone(), v: v.clone(), w };
                let r = borcherds_check(&t, JacobiBox { window: 4, n0: qi(0) }).unwrap();
                assert!(r.failures.is_empty(), "{r:?}");
            }
        }
    }
}

#[test]
fn virasoro_vacuum_derivative() {
    let h = Heisenberg::new(8).unwrap();
    let a = GradedVector::basis(h.a());
    let l = |n: i64, v: &GradedVector| vreg_core::voa_core::virasoro_mode(&h, &h, n, v).unwrap();
    assert_eq!(l(1, &l(-1, &a)).sub(&l(-1, &l(1, &a))), a.scale(&Scalar::from_int(2)));
    let vac = GradedVector::basis(h.vacuum());
    let central = l(2, &l(-2, &vac)).sub(&l(-2, &l(2, &vac)));
    assert_eq!(central, vac.scale(&Scalar::from_q64(q64(1, 2))));
    for v in h.basis_upto(qi(3)) {
        let sample = GradedVector::basis(v.clone());
        for m in -2..=3 {
            for n in -2..=3 {
                assert!(verify_virasoro(&h, &h, m, n, &sample).unwrap(), "L({m}),L({n}) on {v}");
            }
        }
        assert!(verify_vacuum(&h, &v).unwrap().pass());
        for w in h.basis_upto(qi(3)) {
            let r = verify_derivative(&h, &h, &v, &w).unwrap();
            assert!(r.failures.is_empty(), "{:?}", r.failures);
        }
    }
}

#[test]
fn bracket_examples_and_lie_identities() {
    let h = Heisenberg::new(8).unwrap();
    let a = GradedVector::basis(h.a());
    for m in -3..=3 {
        for n in -3..=3 {
            let b = g_bracket(&h, &LieMode { u: a.clone(), m }, &LieMode { u: a.clone(), m: n }).unwrap();
            if m + n == 0 && m != 0 {
                assert_eq!(b.len(), 1);
                assert_eq!(b[&(h.vacuum(), -1)], Scalar::from_int(m));
            } else {
                assert!(b.is_empty(), "[a({m}), a({n})] = {b:?}");
            }
        }
    }
    let om = h.omega();
    let v = h.key(&[2, 1]);
    for n in -3..=3 {
        let b = g_bracket(&h, &LieMode { u: om.clone(), m: 1 }, &LieMode { u: GradedVector::basis(v.clone()), m: n }).unwrap();
        let w = GradedVector::basis(h.key(&[1]));
        let lhs = lie_act(&h, &b, &w).unwrap();
        let rhs = mode_vec(&h, &GradedVector::basis(v.clone()), qi(n), &w).unwrap().scale(&Scalar::from_int(3 - n - 1));
        assert_eq!(lhs, rhs);
    }
}

#[test]
fn two_point_function() {
    let h = Heisenberg::new(8).unwrap();
    let a = h.a();
    let vac = h.vacuum();
    let tp = three_point(&h, &h, &GradedVector::basis(vac.clone()), &a, &a, &vac, 4).unwrap();
    assert_eq!(tp.f.render(1), "(x1 - x2)^-2");
    assert!(tp.report.pass());
    let tp = three_point(&h, &h, &GradedVector::basis(a.clone()), &a, &a, &a, 4).unwrap();
    assert_eq!(tp.f.k, 2);
    assert!(tp.report.pass(), "{:?}", tp.report);
    let tp = three_point(&h, &h, &GradedVector::basis(a.clone()), &vac, &a, &vac, 4).unwrap();
    assert_eq!(tp.f.k, 0);
    assert!(tp.report.pass());
}
