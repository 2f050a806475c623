use vreg_core::dualization::{
    dw_membership, opposite_via, probe_functional, star_mode, star_pairing, verify_conjugated_left, verify_omega_alignment,
    verify_opposite_derivative, verify_star_commutator, Contragredient, Functional, OppTriple, Opposite,
};
use vreg_core::heisenberg::{FockModule, Heisenberg};
use vreg_core::scalars::{q64, qi, Scalar};
use vreg_core::voa_core::{borcherds_check, mode, mode_vec, virasoro_mode, GradedSpace, GradedVector, JacobiBox, Voa};

#[test]
fn opposite_jacobi_algebra_and_module() {
    let h = Heisenberg::new(8).unwrap();
    let opp = Opposite::new(&h, &h, &h);
    let mut checked = 0;
    for u in h.basis_upto(qi(2)) {
        for v in h.basis_upto(qi(2)) {
            for w in h.basis_upto(qi(3)) {
                let t = OppTriple { opp: opp.clone(), u: u.clone(), v: v.clone(), w: w.clone() };
                let r = borcherds_check(&t, JacobiBox { window: 6, n0: qi(0) }).unwrap();
                assert!(r.failures.is_empty(), "{u} {v} {w}: {:?}", r.failures);
                checked += r.checked;
            }
        }
    }
    assert!(checked > 1000);
    let m = FockModule::new(qi(1), qi(6), 2).unwrap();
    let opp = Opposite::new(&h, &m, &m);
    for u in h.basis_upto(qi(2)) {
        for w in m.basis_upto(q64(5, 2)) {
            let t = OppTriple { opp: opp.clone(), u: u.clone(), v: h.a(), w };
            let r = borcherds_check(&t, JacobiBox { window: 4, n0: qi(0) }).unwrap();
            assert!(r.failures.is_empty(), "{:?}", r.failures);
        }
    }
}

#[test]
fn round_trip_recovers_left_action() {
    let h = Heisenberg::new(8).unwrap();
    let opp = Opposite::new(&h, &h, &h);
    for v in h.basis_upto(qi(3)) {
        for w in h.basis_upto(qi(3)) {
            let vv = GradedVector::basis(v.clone());
            let wv = GradedVector::basis(w.clone());
            let top = (h.cutoff() - v.weight - w.weight).to_integer();
            for e in -(v.weight + w.weight).to_integer()..=top {
                let n = qi(-e - 1);
                let back = opposite_via(&h, &vv, n, |u, s| opp.mode(u, s, &wv)).unwrap();
                assert_eq!(back, mode(&h, &v, n, &w).unwrap(), "{v} {w} mode {n}");
            }
        }
    }
}

#[test]
fn double_contragredient() {
    let h = Heisenberg::new(6).unwrap();
    let once = Contragredient { opp: Opposite::new(&h, &h, &h) };
    let twice = Contragredient { opp: Opposite::new(&h, &once, &h) };
    for v in h.basis_upto(qi(2)) {
        for w in h.basis_upto(qi(4)) {
            for n in -4..=6 {
                let n = qi(n);
                let target = v.weight + w.weight - n - qi(1);
                if target < qi(0) || target > qi(6) {
                    continue;
                }
                assert_eq!(mode(&twice, &v, n, &w).unwrap(), mode(&h, &v, n, &w).unwrap(), "{v} {w} {n}");
            }
        }
    }
    // ⟨L′(n)w′, w⟩ = ⟨w′, L(−n)w⟩.
    for wp in h.basis_upto(qi(3)) {
        for n in -2..=2i64 {
            let lw = virasoro_mode(&h, &once, n, &GradedVector::basis(wp.clone())).unwrap();
            for w in h.basis_at(wp.weight - qi(n)) {
                let rhs = virasoro_mode(&h, &h, -n, &GradedVector::basis(w.clone())).unwrap().coeff(&wp);
                assert_eq!(lw.coeff(&w), rhs);
            }
        }
    }
    let y = mode(&once, &h.vacuum(), qi(-1), &h.a()).unwrap();
    assert_eq!(y, GradedVector::basis(h.a()));
}

#[test]
fn shifted_opposite_jacobi() {
    let h = Heisenberg::new(7).unwrap();
    let opp = Opposite::new(&h, &h, &h).shifted(Scalar::t_pow(1));
    let a = h.a();
    for w in [h.vacuum(), a.clone(), h.key(&[1, 1])] {
        let t = OppTriple { opp: opp.clone(), u: a.clone(), v: a.clone(), w };
        let r = borcherds_check(&t, JacobiBox { window: 5, n0: qi(0) }).unwrap();
        assert!(r.pass(), "{r:?}");
    }
    let t = OppTriple { opp: opp.clone(), u: a.clone(), v: h.omega().keys().next().unwrap().clone(), w: a.clone() };
    assert!(borcherds_check(&t, JacobiBox { window: 4, n0: qi(0) }).unwrap().pass());
    let vac = h.vacuum();
    let s = opp.series(&vac, &a).unwrap();
    for (e, c) in s.terms() {
        assert_eq!(c.is_zero(), e[0] != qi(0));
    }
}

#[test]
fn conjugated_left_action() {
    let h = Heisenberg::new(7).unwrap();
    let z = Scalar::t_pow(1);
    for v in h.basis_upto(qi(2)) {
        for w in h.basis_upto(qi(2)) {
            let r = verify_conjugated_left(&h, &h, &v, &w, &z).unwrap();
            assert!(r.pass(), "{v} {w}: {:?}", r.failures);
        }
    }
    let r = verify_conjugated_left(&h, &h, &h.a(), &h.a(), &Scalar::zero()).unwrap();
    assert!(r.pass());
}

#[test]
fn star_commutator_on_full_dual() {
    let h = Heisenberg::new(8).unwrap();
    let opp = Opposite::new(&h, &h, &h);
    let alpha = probe_functional();
    let samples: Vec<_> = h.basis_upto(qi(4)).into_iter().take(10).collect();
    assert_eq!(samples.len(), 10);
    let om = h.key(&[1, 1]);
    let gens = [h.vacuum(), h.a(), om];
    let mut checked = 0;
    for u in &gens {
        for v in &gens {
            for m in -3..=3 {
                for n in -3..=3 {
                    let r = verify_star_commutator(&opp, u, v, m, n, &alpha, &samples).unwrap();
                    assert!(r.failures.is_empty(), "{:?}", r.failures);
                    checked += r.checked;
                }
            }
        }
    }
    assert!(checked > 3000);
    // a*: [a*_m, a*_n] = m δ_{m+n,0}.
    let a = GradedVector::basis(h.a());
    for w in &samples {
        let wv = GradedVector::basis(w.clone());
        let one = star_mode(&opp, &a, qi(2), &star_mode(&opp, &a, qi(-2), &alpha).unwrap()).unwrap();
        let two = star_mode(&opp, &a, qi(-2), &star_mode(&opp, &a, qi(2), &alpha).unwrap()).unwrap();
        assert_eq!(one.apply(&wv).unwrap().sub(&two.apply(&wv).unwrap()), alpha.apply(&wv).unwrap().scale_int(2));
    }
}

#[test]
fn omega_alignment_and_derivative() {
    let h = Heisenberg::new(8).unwrap();
    let opp = Opposite::new(&h, &h, &h);
    assert!(verify_omega_alignment(&opp, qi(4)).unwrap().pass());
    for v in h.basis_upto(qi(2)) {
        for w in h.basis_upto(qi(2)) {
            let r = verify_opposite_derivative(&opp, &v, &w).unwrap();
            assert!(r.pass(), "{:?}", r.failures);
        }
    }
}

#[test]
fn star_restricts_to_contragredient() {
    let h = Heisenberg::new(6).unwrap();
    let opp = Opposite::new(&h, &h, &h);
    let once = Contragredient { opp: opp.clone() };
    let vp = Functional::restricted(GradedVector::basis(h.vacuum()));
    let a = GradedVector::basis(h.a());
    for s in -3..=1 {
        let st = star_mode(&opp, &a, qi(s), &vp).unwrap();
        let prime = mode_vec(&once, &a, qi(s), &GradedVector::basis(h.vacuum())).unwrap();
        assert_eq!(st.support(), Some(&prime));
        for w in h.basis_upto(qi(4)) {
            assert_eq!(st.eval(&w).unwrap(), prime.coeff(&w));
        }
    }
    let ser = star_pairing(&opp, &h.vacuum(), &probe_functional(), &h.a()).unwrap();
    for (e, c) in ser.terms() {
        let expect = if e[0] == qi(0) { probe_functional().eval(&h.a()).unwrap() } else { Scalar::zero() };
        assert_eq!(*c, expect);
    }
}

#[test]
fn restricted_dual_lies_in_dw() {
    let h = Heisenberg::new(8).unwrap();
    let opp = Opposite::new(&h, &h, &h);
    let tests = h.basis_upto(qi(2));
    let vp = Functional::restricted(GradedVector::basis(h.vacuum()));
    let r = dw_membership(&opp, &vp, &tests, 4, qi(4)).unwrap();
    assert!(r.pass, "{r:?}");
    assert_eq!(r.pole_order, 0);
    let r = dw_membership(&opp, &Functional::zero(), &tests, 0, qi(4)).unwrap();
    assert!(r.pass && r.pole_order == 0);
    let r = dw_membership(&opp, &probe_functional(), &[h.a()], 2, qi(3)).unwrap();
    assert!(!r.pass && r.witness.is_some());
}
